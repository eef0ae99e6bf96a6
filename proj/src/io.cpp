#include "qland/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qland/errors.hpp"

namespace qland {

namespace {

constexpr std::string_view kMinimaMagic = "qland-minima 1";
constexpr std::string_view kTsMagic = "qland-ts 1";

void put(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void put_angles(std::string& out, const ParameterVector& theta) {
    for (double v : theta.flat()) {
        out += ' ';
        put(out, v);
    }
}

class LineReader {
public:
    LineReader(std::string_view text, std::string what) : text_(text), what_(std::move(what)) {}

    bool next(std::vector<std::string_view>& fields) {
        while (pos_ < text_.size()) {
            auto end = text_.find('\n', pos_);
            if (end == std::string_view::npos) end = text_.size();
            auto line = text_.substr(pos_, end - pos_);
            pos_ = end + 1;
            ++line_;
            fields.clear();
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
                if (i >= line.size()) break;
                auto j = i;
                while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
                fields.push_back(line.substr(i, j - i));
                i = j;
            }
            if (!fields.empty()) return true;
        }
        return false;
    }

    std::vector<std::string_view> expect(std::string_view key, std::size_t min_fields = 2) {
        std::vector<std::string_view> f;
        if (!next(f)) fail("unexpected end of file, expected '" + std::string(key) + "'");
        if (f[0] != key) fail("expected '" + std::string(key) + "', found '" + std::string(f[0]) + "'");
        if (f.size() < min_fields) fail("missing value for '" + std::string(key) + "'");
        return f;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError(what_ + " line " + std::to_string(line_) + ": " + msg);
    }

    double number(std::string_view s) const {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) fail("bad number '" + std::string(s) + "'");
        return v;
    }

    template <class Int>
    Int integer(std::string_view s) const {
        Int v{};
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) fail("bad integer '" + std::string(s) + "'");
        return v;
    }

private:
    std::string_view text_;
    std::string what_;
    std::size_t pos_ = 0;
    int line_ = 0;
};

void check_magic(LineReader& in, std::string_view magic) {
    std::vector<std::string_view> f;
    if (!in.next(f) || f.size() != 2 || f[0] != magic.substr(0, magic.find(' ')) || f[1] != magic.substr(magic.find(' ') + 1))
        in.fail("missing '" + std::string(magic) + "' header");
}

ParameterVector read_angles(LineReader& in, const std::vector<std::string_view>& f, std::size_t first, int layers) {
    if (f.size() != first + 2 * static_cast<std::size_t>(layers)) in.fail("wrong number of angles");
    std::vector<double> flat;
    for (std::size_t k = first; k < f.size(); ++k) flat.push_back(in.number(f[k]));
    return ParameterVector::from_flat(flat);
}

}  // namespace

std::string serialize_database(const MinimaDatabase& db) {
    const auto& c = db.run_config;
    std::string out;
    out += kMinimaMagic;
    out += "\ngraph_id " + db.graph_id;
    out += "\nlayers " + std::to_string(db.layers);
    out += "\nprovenance ";
    out += to_string(db.provenance);
    out += "\nsteps " + std::to_string(c.steps);
    out += "\ntemperature ";
    put(out, c.temperature);
    out += "\nmax_perturbation ";
    put(out, c.max_perturbation);
    out += "\nrms_threshold ";
    put(out, c.rms_threshold);
    out += "\ndedup_energy ";
    put(out, c.dedup_energy);
    out += "\nseed " + std::to_string(c.seed);
    out += "\nmin_curvature ";
    put(out, c.min_curvature);
    out += "\nalternative";
    for (auto z : db.alternative_states) out += " " + std::to_string(z);
    out += "\nstats " + std::to_string(db.stats.steps) + " " + std::to_string(db.stats.accepted) + " " +
           std::to_string(db.stats.failed) + " " + std::to_string(db.stats.non_minima);
    out += "\nvertices " + std::to_string(db.graph.vertex_count());
    for (const auto& e : db.graph.edges()) {
        out += "\nedge " + std::to_string(e.i) + " " + std::to_string(e.j) + " ";
        put(out, e.w);
    }
    out += "\nrecords " + std::to_string(db.records.size()) + "\n";
    for (const auto& r : db.records) {
        put(out, r.energy);
        out += ' ';
        put(out, r.rms_gradient);
        out += ' ';
        put(out, r.p_solution);
        out += ' ';
        if (r.p_alternative)
            put(out, *r.p_alternative);
        else
            out += '-';
        put_angles(out, r.theta);
        out += '\n';
    }
    return out;
}

MinimaDatabase parse_database(std::string_view text) {
    LineReader in(text, "minima database");
    check_magic(in, kMinimaMagic);
    std::string id(in.expect("graph_id")[1]);
    const int layers = in.integer<int>(in.expect("layers")[1]);
    if (layers < 1) in.fail("layers must be >= 1");
    const auto prov = provenance_from_string(in.expect("provenance")[1]);
    if (!prov) in.fail("unknown provenance");
    BasinHoppingConfig cfg;
    cfg.steps = in.integer<int>(in.expect("steps")[1]);
    cfg.temperature = in.number(in.expect("temperature")[1]);
    cfg.max_perturbation = in.number(in.expect("max_perturbation")[1]);
    cfg.rms_threshold = in.number(in.expect("rms_threshold")[1]);
    cfg.dedup_energy = in.number(in.expect("dedup_energy")[1]);
    cfg.seed = in.integer<std::uint64_t>(in.expect("seed")[1]);
    cfg.min_curvature = in.number(in.expect("min_curvature")[1]);
    std::vector<std::uint64_t> alternative;
    const auto alt_fields = in.expect("alternative", 1);
    for (std::size_t k = 1; k < alt_fields.size(); ++k) alternative.push_back(in.integer<std::uint64_t>(alt_fields[k]));
    const auto st = in.expect("stats", 5);
    BasinHoppingStats stats{in.integer<int>(st[1]), in.integer<int>(st[2]), in.integer<int>(st[3]),
                            in.integer<int>(st[4])};
    const int n = in.integer<int>(in.expect("vertices")[1]);
    std::vector<Edge> edges;
    std::vector<std::string_view> f;
    std::size_t count = 0;
    while (true) {
        if (!in.next(f)) in.fail("missing 'records' line");
        if (f[0] == "records" && f.size() == 2) {
            count = in.integer<std::size_t>(f[1]);
            break;
        }
        if (f[0] != "edge" || f.size() != 4) in.fail("expected 'edge i j w'");
        edges.push_back({in.integer<int>(f[1]), in.integer<int>(f[2]), in.number(f[3])});
    }
    MinimaDatabase db(std::move(id), WeightedGraph(n, std::move(edges)), layers, cfg);
    db.provenance = *prov;
    db.alternative_states = std::move(alternative);
    db.stats = stats;
    for (std::size_t k = 0; k < count; ++k) {
        if (!in.next(f)) in.fail("expected " + std::to_string(count) + " records");
        MinimumRecord r;
        if (f.size() < 4) in.fail("short record");
        r.energy = in.number(f[0]);
        r.rms_gradient = in.number(f[1]);
        r.p_solution = in.number(f[2]);
        if (f[3] != "-") r.p_alternative = in.number(f[3]);
        r.theta = read_angles(in, f, 4, layers);
        if (!db.records.empty() && r.energy < db.records.back().energy) in.fail("records not sorted by energy");
        db.records.push_back(std::move(r));
    }
    if (in.next(f)) in.fail("trailing content");
    return db;
}

std::string serialize_transition_states(const KineticTransitionNetwork& ktn) {
    std::string out;
    out += kTsMagic;
    out += "\ngraph_id " + ktn.minima.graph_id;
    out += "\nlayers " + std::to_string(ktn.minima.layers);
    out += "\ntransition_states " + std::to_string(ktn.transition_states.size()) + "\n";
    for (const auto& ts : ktn.transition_states) {
        put(out, ts.energy);
        out += ' ';
        put(out, ts.rms_gradient);
        out += ' ';
        put(out, ts.negative_eigenvalue);
        out += " " + std::to_string(ts.min_a) + " " + std::to_string(ts.min_b);
        put_angles(out, ts.theta);
        out += '\n';
    }
    return out;
}

KineticTransitionNetwork parse_network(std::string_view minima_text, std::string_view ts_text) {
    KineticTransitionNetwork ktn(parse_database(minima_text));
    LineReader in(ts_text, "transition-state file");
    check_magic(in, kTsMagic);
    if (in.expect("graph_id")[1] != ktn.minima.graph_id) in.fail("graph id differs from the minima file");
    const int layers = in.integer<int>(in.expect("layers")[1]);
    if (layers != ktn.minima.layers) in.fail("layer count differs from the minima file");
    const auto count = in.integer<std::size_t>(in.expect("transition_states")[1]);
    std::vector<std::string_view> f;
    for (std::size_t k = 0; k < count; ++k) {
        if (!in.next(f)) in.fail("expected " + std::to_string(count) + " transition states");
        if (f.size() < 5) in.fail("short record");
        TransitionStateRecord ts;
        ts.energy = in.number(f[0]);
        ts.rms_gradient = in.number(f[1]);
        ts.negative_eigenvalue = in.number(f[2]);
        ts.min_a = in.integer<std::size_t>(f[3]);
        ts.min_b = in.integer<std::size_t>(f[4]);
        ts.theta = read_angles(in, f, 5, layers);
        ktn.transition_states.push_back(std::move(ts));
    }
    if (in.next(f)) in.fail("trailing content");
    ktn.validate();
    return ktn;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path + "'");
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("error writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename into '" + path + "': " + ec.message());
}

}  // namespace qland
