#include "nitool/document.hpp"

#include "json.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace nitool {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& text, std::size_t byte_offset,
                             const std::string& message) {
    int line = 1;
    int col  = 1;
    for (std::size_t i = 0; i < byte_offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    std::ostringstream msg;
    msg << "line " << line << ", column " << col << ": " << message;
    throw DocumentParseError(msg.str(), line, col);
}

Matrix json_to_matrix(const Json& node, const std::string& key) {
    if (!node.is_array() || node.empty()) {
        throw DocumentParseError("field '" + key + "' must be a non-empty array of rows", 0, 0);
    }
    const std::size_t rows = node.size();
    std::size_t       cols = 0;
    Matrix            m;
    for (std::size_t i = 0; i < rows; ++i) {
        const Json& row = node[i];
        if (!row.is_array()) {
            throw DocumentParseError("field '" + key + "': row " + std::to_string(i) +
                                         " is not an array",
                                     0, 0);
        }
        if (i == 0) {
            cols = row.size();
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        }
        if (row.size() != cols) {
            throw DocumentParseError("field '" + key + "': ragged rows", 0, 0);
        }
        for (std::size_t j = 0; j < cols; ++j) {
            if (!row[j].is_number()) {
                throw DocumentParseError("field '" + key + "': non-numeric entry", 0, 0);
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                row[j].get<double>();
        }
    }
    return m;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

const Json& require(const Json& root, const std::string& key) {
    const auto it = root.find(key);
    if (it == root.end()) {
        throw DocumentParseError("missing required field '" + key + "'", 0, 0);
    }
    return *it;
}

}  // namespace

SystemDocument parse_system_document(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        parse_fail(text, e.byte > 0 ? e.byte - 1 : 0, e.what());
    }
    if (!root.is_object()) {
        parse_fail(text, 0, "document must be a JSON object");
    }

    SystemDocument doc;
    const std::string format = require(root, "format").get<std::string>();
    doc.name                 = root.value("name", std::string{});

    try {
        if (format == "state_space") {
            doc.format = SystemDocument::Format::StateSpace;
            doc.state_space.emplace(json_to_matrix(require(root, "a"), "a"),
                                    json_to_matrix(require(root, "b"), "b"),
                                    json_to_matrix(require(root, "c"), "c"),
                                    json_to_matrix(require(root, "d"), "d"), doc.name);
        } else if (format == "modal") {
            doc.format = SystemDocument::Format::Modal;
            ModalModel model;
            const Json& modes = require(root, "modes");
            if (!modes.is_array()) {
                throw DocumentParseError("field 'modes' must be an array of [k, zeta, wn]", 0, 0);
            }
            for (const Json& entry : modes) {
                if (!entry.is_array() || entry.size() != 3) {
                    throw DocumentParseError("each mode must be a [k, zeta, wn] triple", 0, 0);
                }
                model.modes.push_back(Mode{entry[0].get<double>(), entry[1].get<double>(),
                                           entry[2].get<double>()});
            }
            model.validate();
            doc.modal = std::move(model);
        } else if (format == "two_mass") {
            doc.format = SystemDocument::Format::TwoMass;
            TwoMassParams params{require(root, "k").get<double>(),
                                 require(root, "alpha").get<double>()};
            params.validate();
            doc.two_mass = params;
            const std::string part = root.value("part", std::string{"delta"});
            if (part == "delta") {
                doc.two_mass_part = SystemDocument::TwoMassPart::Delta;
            } else if (part == "nominal") {
                doc.two_mass_part = SystemDocument::TwoMassPart::Nominal;
            } else if (part == "full") {
                doc.two_mass_part = SystemDocument::TwoMassPart::Full;
            } else {
                throw DocumentParseError("field 'part' must be delta, nominal or full", 0, 0);
            }
        } else {
            throw DocumentParseError("unknown format '" + format +
                                         "' (expected state_space, modal or two_mass)",
                                     0, 0);
        }
    } catch (const std::invalid_argument& e) {
        throw DocumentParseError(e.what(), 0, 0);
    }
    return doc;
}

SystemDocument load_system_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DocumentParseError("cannot open file '" + path + "'", 0, 0);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_system_document(buffer.str());
}

std::string serialize_system_document(const SystemDocument& doc) {
    Json root;
    switch (doc.format) {
        case SystemDocument::Format::StateSpace: {
            root["format"] = "state_space";
            root["name"]   = doc.name;
            root["a"]      = matrix_to_json(doc.state_space->a);
            root["b"]      = matrix_to_json(doc.state_space->b);
            root["c"]      = matrix_to_json(doc.state_space->c);
            root["d"]      = matrix_to_json(doc.state_space->d);
            break;
        }
        case SystemDocument::Format::Modal: {
            root["format"] = "modal";
            root["name"]   = doc.name;
            Json modes     = Json::array();
            for (const Mode& mode : doc.modal->modes) {
                modes.push_back(Json::array({mode.gain, mode.damping, mode.natural_frequency}));
            }
            root["modes"] = std::move(modes);
            break;
        }
        case SystemDocument::Format::TwoMass: {
            root["format"] = "two_mass";
            root["name"]   = doc.name;
            root["k"]      = doc.two_mass->stiffness_k;
            root["alpha"]  = doc.two_mass->damping_alpha;
            switch (doc.two_mass_part) {
                case SystemDocument::TwoMassPart::Delta: root["part"] = "delta"; break;
                case SystemDocument::TwoMassPart::Nominal: root["part"] = "nominal"; break;
                case SystemDocument::TwoMassPart::Full: root["part"] = "full"; break;
            }
            break;
        }
    }
    return root.dump(2) + "\n";
}

StateSpaceSystem document_to_system(const SystemDocument& doc) {
    switch (doc.format) {
        case SystemDocument::Format::StateSpace: return *doc.state_space;
        case SystemDocument::Format::Modal:
            return modal_to_state_space(*doc.modal, doc.name.empty() ? "modal" : doc.name);
        case SystemDocument::Format::TwoMass: {
            TwoMassPlant plant = two_mass_plant(*doc.two_mass);
            switch (doc.two_mass_part) {
                case SystemDocument::TwoMassPart::Delta: return plant.uncertainty;
                case SystemDocument::TwoMassPart::Nominal: return plant.nominal;
                case SystemDocument::TwoMassPart::Full: return plant.full;
            }
            break;
        }
    }
    throw std::logic_error("document_to_system: unhandled format");
}

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

void write_sweep_csv(std::ostream& os, const std::vector<FrequencySample>& samples) {
    if (samples.empty()) {
        throw std::invalid_argument("write_sweep_csv: no samples");
    }
    const Eigen::Index p = samples.front().value.rows();
    const Eigen::Index m = samples.front().value.cols();

    os << "omega";
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            os << ",re_" << (i + 1) << (j + 1) << ",im_" << (i + 1) << (j + 1);
        }
    }
    for (Eigen::Index i = 0; i < samples.front().imag_part_spectrum.size(); ++i) {
        os << ",lambda_" << (i + 1);
    }
    os << "\n";

    for (const FrequencySample& s : samples) {
        os << format_double(s.omega);
        for (Eigen::Index i = 0; i < p; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                os << ',' << format_double(s.value(i, j).real()) << ','
                   << format_double(s.value(i, j).imag());
            }
        }
        for (Eigen::Index i = 0; i < s.imag_part_spectrum.size(); ++i) {
            os << ',' << format_double(s.imag_part_spectrum(i));
        }
        os << "\n";
    }
}

}  // namespace nitool
