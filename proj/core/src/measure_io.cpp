#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "polyspec/errors.hpp"
#include "polyspec/torus_measure.hpp"

namespace polyspec {

namespace {

std::string shortest(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ValidationError("cannot parse number '" + std::string(text) + "'");
    return value;
}

int parse_int_field(const std::string& token, std::string_view name) {
    const std::string value = token.substr(name.size() + 1);
    int out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw ValidationError("bad measure header field '" + token + "'");
    return out;
}

}  // namespace

std::string format_window(std::span<const FrequencyInterval> window) {
    std::string out;
    for (std::size_t j = 0; j < window.size(); ++j) {
        if (j > 0) out += ',';
        out += shortest(window[j].lo);
        out += ':';
        out += shortest(window[j].hi);
    }
    return out;
}

std::vector<FrequencyInterval> parse_window(const std::string& text) {
    std::vector<FrequencyInterval> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ValidationError("window interval '" + item + "' is not of the form lo:hi");
        FrequencyInterval w{parse_double(std::string_view(item).substr(0, colon)),
                            parse_double(std::string_view(item).substr(colon + 1))};
        if (w.lo > w.hi) throw ValidationError("window interval '" + item + "' has lo > hi");
        out.push_back(w);
    }
    if (out.empty()) throw ValidationError("empty window");
    return out;
}

void write_measure(std::ostream& out, const JointMeasure& measure, const std::vector<std::string>& extra_header) {
    out << "# polyspec joint measure\n";
    out << "# tool=polyspec " << version_string() << '\n';
    out << "# n=" << measure.n() << " k=" << measure.k() << " window=" << format_window(measure.window()) << '\n';
    for (const auto& line : extra_header) out << "# " << line << '\n';
    out << "# columns:";
    for (int j = 1; j <= measure.k() + 1; ++j) out << " q" << j;
    out << " count\n";
    for (const auto& atom : measure.atoms()) {
        for (auto q : atom.key.q) out << q << ' ';
        out << atom.count << '\n';
    }
}

JointMeasure read_measure(std::istream& in) {
    int n = -1;
    int k = -1;
    std::vector<FrequencyInterval> window;
    std::vector<Atom> atoms;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == '#') {
            std::string token;
            while (ls >> token) {
                if (token.rfind("n=", 0) == 0) n = parse_int_field(token, "n");
                else if (token.rfind("k=", 0) == 0) k = parse_int_field(token, "k");
                else if (token.rfind("window=", 0) == 0) window = parse_window(token.substr(7));
            }
            continue;
        }
        if (n < 0 || k < 0) throw ValidationError("measure data before the n=/k= header line");
        Atom atom;
        atom.key.q.resize(static_cast<std::size_t>(k) + 1);
        for (auto& q : atom.key.q)
            if (!(ls >> q)) throw ValidationError("malformed atom line: '" + line + "'");
        if (!(ls >> atom.count)) throw ValidationError("malformed atom line: '" + line + "'");
        std::string rest;
        if (ls >> rest) throw ValidationError("trailing data on atom line: '" + line + "'");
        atoms.push_back(std::move(atom));
    }
    if (n < 0 || k < 0) throw ValidationError("measure file lacks the n=/k= header line");
    return JointMeasure(n, k, std::move(window), std::move(atoms));
}

}  // namespace polyspec
