#include "ccheis/spec_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace ccheis {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_error(int line, const std::string& what)
{
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double to_double(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw Error(ErrorCode::ParseError, "not a number: '" + std::string(s) + "'");
    return v;
}

std::vector<double> number_list(std::string_view s)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = s.find(',', pos);
        out.push_back(to_double(s.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace

GroupSpec parse_spec(std::string_view text)
{
    std::map<std::string, std::pair<nlohmann::json, int>> fields;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        // A '#' inside a quoted string is not a comment.
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '"') quoted = !quoted;
            if (s[i] == '#' && !quoted) {
                s = s.substr(0, i);
                break;
            }
        }
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) parse_error(line, "expected 'key = value'");
        const std::string key(trim(s.substr(0, eq)));
        if (key != "blocks" && key != "m" && key != "b" && key != "u") parse_error(line, "unknown key '" + key + "'");
        if (fields.count(key)) parse_error(line, "duplicate key '" + key + "'");
        nlohmann::json value;
        try {
            value = nlohmann::json::parse(trim(s.substr(eq + 1)));
        } catch (const nlohmann::json::exception&) {
            parse_error(line, "value of '" + key + "' is not a valid literal");
        }
        fields[key] = {value, line};
    }

    if (!fields.count("blocks")) throw Error(ErrorCode::ParseError, "missing key 'blocks'");
    if (!fields.count("m")) throw Error(ErrorCode::ParseError, "missing key 'm'");

    std::vector<SpectrumBlock> blocks;
    {
        const auto& [v, ln] = fields["blocks"];
        if (!v.is_array() || v.empty()) parse_error(ln, "'blocks' must be a non-empty array of [a, k] pairs");
        for (const auto& p : v) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number_integer())
                parse_error(ln, "each block must be [a, k] with integer k");
            blocks.push_back({p[0].get<double>(), p[1].get<int>()});
        }
    }
    int m = 0;
    {
        const auto& [v, ln] = fields["m"];
        if (!v.is_number_integer()) parse_error(ln, "'m' must be an integer");
        m = v.get<int>();
    }
    std::vector<double> b;
    if (fields.count("b")) {
        const auto& [v, ln] = fields["b"];
        if (!v.is_array()) parse_error(ln, "'b' must be an array");
        for (const auto& x : v) {
            if (!x.is_number()) parse_error(ln, "'b' entries must be numbers");
            b.push_back(x.get<double>());
        }
    } else if (m > 0) {
        b.assign(m, 0.0);
    }

    GroupSpec spec = GroupSpec::create(blocks, m, b);
    if (fields.count("u")) {
        const auto& [v, ln] = fields["u"];
        if (!v.is_string() || v.get<std::string>() != "standard-m1")
            parse_error(ln, "'u' must be \"standard-m1\"");
        spec = standard_u_m1(spec);
    }
    return spec;
}

GroupSpec load_spec(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::ParseError, "cannot open spec file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_spec(ss.str());
}

GroupPoint parse_point(const GroupSpec& spec, std::string_view text)
{
    const auto semi = text.find(';');
    if (semi == std::string_view::npos) throw Error(ErrorCode::ParseError, "point needs ';' before the t components");
    const std::string_view xs = text.substr(0, semi), ts = text.substr(semi + 1);

    GroupPoint g{Vec::Zero(spec.dim_x()), Vec::Zero(spec.m())};
    std::size_t pos = 0;
    for (int j = 0; j < spec.ell(); ++j) {
        const auto bar = xs.find('|', pos);
        if ((bar == std::string_view::npos) != (j == spec.ell() - 1))
            throw Error(ErrorCode::ParseError, "point has the wrong number of x blocks (expected " +
                                                   std::to_string(spec.ell()) + ")");
        const auto vals = number_list(xs.substr(pos, bar == std::string_view::npos ? bar : bar - pos));
        if (static_cast<int>(vals.size()) != 2 * spec.k(j))
            throw Error(ErrorCode::ParseError, "x block " + std::to_string(j + 1) + " needs " +
                                                   std::to_string(2 * spec.k(j)) + " entries");
        for (std::size_t i = 0; i < vals.size(); ++i) g.x[spec.block_offset(j) + static_cast<int>(i)] = vals[i];
        pos = bar + 1;
    }
    const auto tv = number_list(ts);
    if (static_cast<int>(tv.size()) != spec.m())
        throw Error(ErrorCode::ParseError, "t needs " + std::to_string(spec.m()) + " entries");
    for (int l = 0; l < spec.m(); ++l) g.t[l] = tv[l];
    return g;
}

std::string format_point(const GroupSpec& spec, const GroupPoint& g)
{
    std::ostringstream os;
    os.precision(17);
    for (int j = 0; j < spec.ell(); ++j) {
        if (j) os << '|';
        for (int i = 0; i < 2 * spec.k(j); ++i) {
            if (i) os << ',';
            os << g.x[spec.block_offset(j) + i];
        }
    }
    os << ';';
    for (int l = 0; l < spec.m(); ++l) {
        if (l) os << ',';
        os << g.t[l];
    }
    return os.str();
}

} // namespace ccheis
