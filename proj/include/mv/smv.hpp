#ifndef MV_SMV_HPP
#define MV_SMV_HPP

#include <sstream>
#include <string>
#include <vector>

#include "mv/ltl.hpp"
#include "mv/partition.hpp"
#include "mv/rules.hpp"

namespace mv {

/// Writes one semantic trace as an SMV model for cross-checking with an external model
/// checker. A step counter advances once per instant and then stays at the last one, so
/// the model's single run is the stutter-extended trace. Each atom is a boolean variable
/// assigned per step; each rule becomes an LTLSPEC.
[[nodiscard]] inline std::string export_smv(std::vector<Signature> const& sigs, std::vector<RuleSpec> const& rules,
                                            bool congested, PropositionSet const& props) {
    if (sigs.empty()) throw Error("cannot export an empty trace");
    auto const trace = props.trace_of(sigs, congested);
    std::size_t const last = trace.size() - 1;

    std::ostringstream os;
    os << "-- trace:";
    for (std::size_t i = 0; i < sigs.size(); ++i) os << (i ? " -> " : " ") << sigs[i].str();
    os << "\nMODULE main\nVAR\n";
    os << "  step : 0.." << last << ";\n";
    for (auto const& a : trace.atoms()) os << "  " << a << " : boolean;\n";
    os << "ASSIGN\n";
    os << "  init(step) := 0;\n";
    if (last == 0) {
        os << "  next(step) := step;\n";
    } else {
        os << "  next(step) := case step < " << last << " : step + 1; TRUE : step; esac;\n";
    }
    for (std::size_t a = 0; a < trace.atoms().size(); ++a) {
        os << "  " << trace.atoms()[a] << " := case";
        for (std::size_t i = 0; i < last; ++i) {
            os << " step = " << i << " : " << (trace.state(i)[a] ? "TRUE" : "FALSE") << ";";
        }
        os << " TRUE : " << (trace.state(last)[a] ? "TRUE" : "FALSE") << "; esac;\n";
    }
    for (auto const& r : rules) {
        os << "-- " << r.name << "\n";
        os << "LTLSPEC " << ltl::print(r.formula, ltl::Dialect::smv) << "\n";
    }
    return os.str();
}

}  // namespace mv

#endif  // MV_SMV_HPP
