#include "qbl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qbl/error.hpp"
#include "qbl/symplectic.hpp"

namespace qbl {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

[[noreturn]] void fail(const std::string& source, const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ParseError, source + ": " + where + ": " + what);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        out.push_back(trim(cell));
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parse_number(const std::string& cell, const std::string& source, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) {
            fail(source, where, "trailing characters in number '" + cell + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        fail(source, where, "not a number: '" + cell + "'");
    }
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows, const std::string& source,
                      const std::string& where) {
    if (rows.empty() || rows.front().empty()) {
        fail(source, where, "matrix has no entries");
    }
    const std::size_t cols = rows.front().size();
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            fail(source, where + " row " + std::to_string(i + 1),
                 "expected " + std::to_string(cols) + " entries, got " +
                     std::to_string(rows[i].size()));
        }
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
        }
    }
    return m;
}

Matrix json_matrix(const json& node, const std::string& source, const std::string& where) {
    if (!node.is_array()) {
        fail(source, where, "expected an array of rows");
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const auto& row = node[i];
        if (!row.is_array()) {
            fail(source, where + " row " + std::to_string(i + 1), "expected an array");
        }
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number()) {
                fail(source, where + " row " + std::to_string(i + 1), "non-numeric entry");
            }
            r.push_back(v.get<double>());
        }
        rows.push_back(std::move(r));
    }
    return rows_to_matrix(rows, source, where);
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::optional<MapKind> parse_kind(const std::string& text, const std::string& source,
                                  const std::string& where) {
    if (text.empty()) {
        return std::nullopt;
    }
    if (text == "quantum") {
        return MapKind::Quantum;
    }
    if (text == "classical") {
        return MapKind::Classical;
    }
    if (text == "invalid") {
        return MapKind::Invalid;
    }
    fail(source, where, "unknown map kind '" + text + "'");
}

struct RawMap {
    Matrix matrix;
    std::optional<MapKind> declared;
    std::string label;
};

DatumFile assemble(int version, std::optional<int> modes, std::vector<RawMap> maps,
                   std::optional<std::vector<double>> p, const std::string& source) {
    if (version != 1) {
        fail(source, "version", "unsupported version " + std::to_string(version));
    }
    if (!modes) {
        fail(source, "m", "missing number of modes");
    }
    if (maps.empty()) {
        fail(source, "maps", "datum needs at least one map");
    }
    if (!p) {
        fail(source, "p", "missing weights");
    }
    if (p->size() != maps.size()) {
        fail(source, "p", "expected " + std::to_string(maps.size()) + " weights, got " +
                              std::to_string(p->size()));
    }
    std::vector<BLMap> built;
    std::vector<std::string> labels;
    bool any_label = false;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        if (maps[i].matrix.cols() != 2 * static_cast<Index>(*modes)) {
            fail(source, "map " + std::to_string(i + 1),
                 "expected " + std::to_string(2 * *modes) + " columns");
        }
        BLMap map = BLMap::make(maps[i].matrix);
        if (maps[i].declared && *maps[i].declared != map.kind) {
            throw Error(ErrorCode::KindMismatch,
                        "map " + std::to_string(i + 1) + " declared " +
                            to_string(*maps[i].declared) + " but is " + to_string(map.kind));
        }
        built.push_back(std::move(map));
        labels.push_back(maps[i].label);
        any_label = any_label || !maps[i].label.empty();
    }
    Vector weights = Eigen::Map<const Vector>(p->data(), static_cast<Index>(p->size()));
    DatumFile out{version, BLDatum(*modes, std::move(built), weights), {}};
    if (any_label) {
        out.labels = std::move(labels);
    }
    return out;
}

DatumFile parse_datum_json(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(source, "byte " + std::to_string(e.byte), e.what());
    }
    if (!doc.is_object()) {
        fail(source, "document", "expected a JSON object");
    }
    int version = 1;
    if (doc.contains("version")) {
        if (!doc["version"].is_number_integer()) {
            fail(source, "version", "expected an integer");
        }
        version = doc["version"].get<int>();
    }
    std::optional<int> modes;
    if (doc.contains("m")) {
        if (!doc["m"].is_number_integer()) {
            fail(source, "m", "expected an integer");
        }
        modes = doc["m"].get<int>();
    }
    std::vector<RawMap> maps;
    if (!doc.contains("maps") || !doc["maps"].is_array()) {
        fail(source, "maps", "expected an array of maps");
    }
    for (std::size_t i = 0; i < doc["maps"].size(); ++i) {
        const auto& node = doc["maps"][i];
        const std::string where = "maps[" + std::to_string(i) + "]";
        if (!node.is_object() || !node.contains("rows")) {
            fail(source, where, "expected an object with \"rows\"");
        }
        RawMap raw;
        raw.matrix = json_matrix(node["rows"], source, where + ".rows");
        if (node.contains("kind")) {
            if (!node["kind"].is_string()) {
                fail(source, where + ".kind", "expected a string");
            }
            raw.declared = parse_kind(node["kind"].get<std::string>(), source, where + ".kind");
        }
        if (node.contains("label")) {
            if (!node["label"].is_string()) {
                fail(source, where + ".label", "expected a string");
            }
            raw.label = node["label"].get<std::string>();
        }
        maps.push_back(std::move(raw));
    }
    std::optional<std::vector<double>> p;
    if (doc.contains("p")) {
        if (!doc["p"].is_array()) {
            fail(source, "p", "expected an array");
        }
        std::vector<double> w;
        for (const auto& v : doc["p"]) {
            if (!v.is_number()) {
                fail(source, "p", "non-numeric weight");
            }
            w.push_back(v.get<double>());
        }
        p = std::move(w);
    }
    return assemble(version, modes, std::move(maps), std::move(p), source);
}

DatumFile parse_datum_csv(const std::string& text, const std::string& source) {
    int version = 1;
    std::optional<int> modes;
    std::vector<RawMap> maps;
    std::vector<std::vector<std::vector<double>>> rows;
    std::vector<int> map_lines;
    std::optional<std::vector<double>> p;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool in_map = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = "line " + std::to_string(line_no);
        const auto cells = split_csv(line);
        const std::string& head = cells.front();
        if (head == "version" || head == "m") {
            if (cells.size() != 2) {
                fail(source, where, head + " takes one value");
            }
            const double v = parse_number(cells[1], source, where);
            if (v != std::floor(v)) {
                fail(source, where, head + " must be an integer");
            }
            (head == "version" ? version : modes.emplace()) = static_cast<int>(v);
            in_map = false;
        } else if (head == "map") {
            RawMap raw;
            if (cells.size() > 1) {
                raw.declared = parse_kind(cells[1], source, where);
            }
            if (cells.size() > 2) {
                raw.label = cells[2];
            }
            if (cells.size() > 3) {
                fail(source, where, "map takes at most a kind and a label");
            }
            maps.push_back(std::move(raw));
            rows.emplace_back();
            map_lines.push_back(line_no);
            in_map = true;
        } else if (head == "p") {
            std::vector<double> w;
            for (std::size_t k = 1; k < cells.size(); ++k) {
                w.push_back(parse_number(cells[k], source, where));
            }
            p = std::move(w);
            in_map = false;
        } else if (in_map) {
            std::vector<double> r;
            for (const auto& c : cells) {
                r.push_back(parse_number(c, source, where));
            }
            rows.back().push_back(std::move(r));
        } else {
            fail(source, where, "unexpected line '" + line + "'");
        }
    }
    for (std::size_t i = 0; i < maps.size(); ++i) {
        maps[i].matrix = rows_to_matrix(rows[i], source,
                                        "map at line " + std::to_string(map_lines[i]));
    }
    return assemble(version, modes, std::move(maps), std::move(p), source);
}

json parse_json_object(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(source, "byte " + std::to_string(e.byte), e.what());
    }
    if (!doc.is_object()) {
        fail(source, "document", "expected a JSON object");
    }
    return doc;
}

int json_int(const json& doc, const std::string& key, const std::string& source) {
    if (!doc.contains(key) || !doc[key].is_number_integer()) {
        fail(source, key, "expected an integer");
    }
    return doc[key].get<int>();
}

} // namespace

DatumFile parse_datum_text(const std::string& text, const std::string& source) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        return parse_datum_json(text, source);
    }
    return parse_datum_csv(text, source);
}

DatumFile parse_datum(const std::filesystem::path& path) {
    return parse_datum_text(read_file(path), path.string());
}

std::string serialize_datum(const BLDatum& d, const std::vector<std::string>& labels) {
    json doc;
    doc["version"] = 1;
    doc["m"] = d.modes();
    json maps = json::array();
    for (std::size_t i = 0; i < d.size(); ++i) {
        json node;
        node["rows"] = matrix_json(d.map(i).matrix);
        node["kind"] = to_string(d.map(i).kind);
        if (i < labels.size() && !labels[i].empty()) {
            node["label"] = labels[i];
        }
        maps.push_back(std::move(node));
    }
    doc["maps"] = std::move(maps);
    json p = json::array();
    for (Index i = 0; i < d.weights().size(); ++i) {
        p.push_back(d.weights()(i));
    }
    doc["p"] = std::move(p);
    return doc.dump(2) + "\n";
}

GaussianJoint parse_joint_text(const std::string& text, const std::string& source) {
    const json doc = parse_json_object(text, source);
    if (!doc.contains("gamma")) {
        fail(source, "gamma", "missing covariance matrix");
    }
    Matrix gamma = json_matrix(doc["gamma"], source, "gamma");
    const Index x_dim = doc.contains("x_dim") ? json_int(doc, "x_dim", source) : gamma.rows();
    SubsystemKind kind = SubsystemKind::Quantum;
    if (doc.contains("x_kind")) {
        const std::string k = doc["x_kind"].is_string() ? doc["x_kind"].get<std::string>() : "";
        if (k == "classical") {
            kind = SubsystemKind::Classical;
        } else if (k != "quantum") {
            fail(source, "x_kind", "expected \"quantum\" or \"classical\"");
        }
    }
    return GaussianJoint(std::move(gamma), x_dim, kind);
}

GaussianJoint parse_joint(const std::filesystem::path& path) {
    return parse_joint_text(read_file(path), path.string());
}

std::string serialize_joint(const GaussianJoint& joint) {
    json doc;
    doc["gamma"] = matrix_json(joint.gamma());
    doc["x_dim"] = joint.x_dim();
    doc["x_kind"] = joint.x_kind() == SubsystemKind::Quantum ? "quantum" : "classical";
    return doc.dump(2) + "\n";
}

QuadHamiltonian parse_hamiltonian_text(const std::string& text, const std::string& source) {
    const json doc = parse_json_object(text, source);
    if (!doc.contains("H")) {
        fail(source, "H", "missing Hamiltonian matrix");
    }
    return QuadHamiltonian(json_matrix(doc["H"], source, "H"), json_int(doc, "m1", source),
                           json_int(doc, "m2", source));
}

QuadHamiltonian parse_hamiltonian(const std::filesystem::path& path) {
    return parse_hamiltonian_text(read_file(path), path.string());
}

Matrix parse_matrix_file(const std::filesystem::path& path, const std::string& key) {
    const std::string source = path.string();
    const json doc = parse_json_object(read_file(path), source);
    if (!doc.contains(key)) {
        fail(source, key, "missing matrix");
    }
    return json_matrix(doc[key], source, key);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace qbl
