#include "emstress/checkpoint.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace emstress {

namespace {

constexpr const char* magic = "stpinn-v1";

std::string format(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& token)
{
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0' || errno == ERANGE)
        throw CheckpointError("malformed number '" + token + "'");
    return v;
}

int parse_int(const std::string& token)
{
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(token, &used);
    } catch (const std::exception&) {
        throw CheckpointError("malformed integer '" + token + "'");
    }
    if (used != token.size())
        throw CheckpointError("malformed integer '" + token + "'");
    return v;
}

// Reads "key v1 v2 ..." and returns the values.
std::vector<std::string> expect_line(std::istream& is, const std::string& key)
{
    std::string line;
    if (!std::getline(is, line))
        throw CheckpointError("truncated checkpoint: missing '" + key + "' line");
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key)
        throw CheckpointError("expected '" + key + "' line, found '" + line + "'");
    std::vector<std::string> out;
    for (std::string tok; ls >> tok;)
        out.push_back(tok);
    return out;
}

std::string join_sizes(const std::vector<int>& sizes)
{
    std::string s;
    for (int v : sizes)
        s += " " + std::to_string(v);
    return s;
}

} // namespace

void save_checkpoint(const StpinnModel& model, std::ostream& os)
{
    const auto& a = model.architecture();
    const auto& sc = model.scaling();
    os << magic << "\n";
    os << "channels " << a.channels << "\n";
    os << "ft_layers" << join_sizes(a.ft_sizes()) << "\n";
    os << "f_layers" << join_sizes(a.f_sizes()) << "\n";
    os << "theta";
    for (int k = 0; k < a.channels; ++k)
        os << " " << format(model.theta(k));
    os << "\n";
    os << "scaling " << format(sc.sigma) << " " << format(sc.x) << " " << format(sc.t) << "\n";
    os << "g_input " << (a.g_input ? 1 : 0) << "\n";
    if (a.activation != Activation::tanh)
        os << "activation " << to_string(a.activation) << "\n";
    const auto& p = model.parameters();
    const auto weights = static_cast<Eigen::Index>(model.theta_offset());
    for (Eigen::Index i = 0; i < weights; ++i)
        os << format(p[i]) << "\n";
    if (!os)
        throw CheckpointError("failed to write checkpoint");
}

void save_checkpoint(const StpinnModel& model, const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw CheckpointError("cannot open '" + path + "' for writing");
    save_checkpoint(model, os);
}

StpinnModel load_checkpoint(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw CheckpointError("empty checkpoint");
    if (line != magic)
        throw CheckpointError("unsupported checkpoint version '" + line + "' (expected " + magic + ")");

    Architecture a;
    const auto ch = expect_line(is, "channels");
    if (ch.size() != 1)
        throw CheckpointError("channels line needs one value");
    a.channels = parse_int(ch[0]);

    std::vector<int> ft, f;
    for (const auto& t : expect_line(is, "ft_layers"))
        ft.push_back(parse_int(t));
    for (const auto& t : expect_line(is, "f_layers"))
        f.push_back(parse_int(t));
    const auto theta = expect_line(is, "theta");
    const auto scaling = expect_line(is, "scaling");
    const auto g = expect_line(is, "g_input");

    if (a.channels < 0)
        throw CheckpointError("negative channel count");
    if (a.channels == 0 && !ft.empty())
        throw CheckpointError("ft_layers given for a model without channels");
    if (a.channels > 0 && (ft.size() < 2 || ft.front() != 1 || ft.back() != a.channels))
        throw CheckpointError("ft_layers inconsistent with the channel count");
    if (f.size() < 2 || f.back() != 1)
        throw CheckpointError("f_layers must end in a single output");
    if (static_cast<int>(theta.size()) != a.channels)
        throw CheckpointError("theta count does not match the channel count");
    if (scaling.size() != 3)
        throw CheckpointError("scaling line needs three values");
    if (g.size() != 1 || (g[0] != "0" && g[0] != "1"))
        throw CheckpointError("g_input must be 0 or 1");
    a.g_input = g[0] == "1";
    a.spatial_dim = f.front() - 1 - (a.g_input ? 1 : 0);
    if (a.spatial_dim != 1 && a.spatial_dim != 2)
        throw CheckpointError("f_layers input width is inconsistent with g_input");
    if (!ft.empty())
        a.ft_hidden.assign(ft.begin() + 1, ft.end() - 1);
    a.f_hidden.assign(f.begin() + 1, f.end() - 1);

    std::vector<double> values;
    bool activation_seen = false;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        if (!activation_seen && values.empty() && line.rfind("activation ", 0) == 0) {
            a.activation = activation_from_string(line.substr(11));
            activation_seen = true;
            continue;
        }
        values.push_back(parse_double(line));
    }

    ScalingConfig sc{parse_double(scaling[0]), parse_double(scaling[1]), parse_double(scaling[2])};
    StpinnModel model(a, sc);
    const auto expected = model.theta_offset();
    if (values.size() != expected)
        throw CheckpointError("checkpoint holds " + std::to_string(values.size()) + " weights, layers declare " +
                              std::to_string(expected));
    Eigen::VectorXd p(model.parameter_count());
    for (std::size_t i = 0; i < values.size(); ++i)
        p[static_cast<Eigen::Index>(i)] = values[i];
    for (int k = 0; k < a.channels; ++k)
        p[static_cast<Eigen::Index>(expected) + k] = parse_double(theta[static_cast<std::size_t>(k)]);
    model.set_parameters(p);
    return model;
}

StpinnModel load_checkpoint(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw CheckpointError("cannot open checkpoint '" + path + "'");
    return load_checkpoint(is);
}

} // namespace emstress
