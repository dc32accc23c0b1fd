#pragma once

#include "nitool/models.hpp"
#include "nitool/sweep.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace nitool {

/// Parse failure with 1-based line/column context from the underlying text.
struct DocumentParseError : std::runtime_error {
    DocumentParseError(const std::string& message, int line_in, int column_in)
        : std::runtime_error(message), line(line_in), column(column_in) {}
    int line;
    int column;
};

/// On-disk description of a system, one of three formats:
///
///   {"format": "state_space", "name": "...", "a": [[..]], "b": [[..]],
///    "c": [[..]], "d": [[..]]}
///   {"format": "modal", "name": "...", "modes": [[k, zeta, wn], ...]}
///   {"format": "two_mass", "name": "...", "k": 2.0, "alpha": 1.0,
///    "part": "delta" | "nominal" | "full"}      (part defaults to "delta")
struct SystemDocument {
    enum class Format { StateSpace, Modal, TwoMass };
    enum class TwoMassPart { Delta, Nominal, Full };

    Format      format = Format::StateSpace;
    std::string name;

    std::optional<StateSpaceSystem> state_space;
    std::optional<ModalModel>       modal;
    std::optional<TwoMassParams>    two_mass;
    TwoMassPart                     two_mass_part = TwoMassPart::Delta;
};

SystemDocument parse_system_document(const std::string& text);
SystemDocument load_system_document(const std::string& path);

/// Canonical serialization: fixed key order, shortest round-trip numbers.
/// serialize(parse(serialize(doc))) == serialize(doc), byte for byte.
std::string serialize_system_document(const SystemDocument& doc);

/// Realizes the document as a state-space system (modal models through their
/// block-diagonal realization, two-mass documents through the selected part).
StateSpaceSystem document_to_system(const SystemDocument& doc);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Sweep CSV: header omega,re_11,im_11,...,lambda_1,...,lambda_p with the
/// response entries in row-major order and the spectrum ascending; numbers in
/// full round-trip precision.
void write_sweep_csv(std::ostream& os, const std::vector<FrequencySample>& samples);

}  // namespace nitool
