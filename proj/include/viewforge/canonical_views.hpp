#pragma once

#include <string>
#include <vector>

#include "viewforge/model.hpp"
#include "viewforge/view.hpp"

namespace viewforge {

struct SourceVars {
    std::string source;
    std::vector<Term> svars;
    /// Variables shared with an atom of another source, first-occurrence order.
    std::vector<Term> sjvars;
};

struct SourceVarReport {
    std::vector<SourceVars> per_source;
    const SourceVars& of(const std::string& source) const;
};

class EmptySourceBody : public InputError {
  public:
    explicit EmptySourceBody(const std::string& source)
        : InputError("query has no atom on source '" + source + "'"), source_(source) {}
    const std::string& source() const { return source_; }

  private:
    std::string source_;
};

/// Throws InputError when an atom uses an unknown relation.
SourceVarReport source_vars(const ConjunctiveQuery& q, const DSchema& schema);

/// Atoms of q readable by source s (replicated atoms included).
std::vector<Atom> source_atoms(const ConjunctiveQuery& q, const std::string& s, const DSchema& schema);
/// Sources with at least one atom of q, in schema order.
std::vector<std::string> sources_of(const ConjunctiveQuery& q, const DSchema& schema);

/// View named V_<s>. Throws EmptySourceBody when q has no s-atom.
View canonical_view(const ConjunctiveQuery& q, const std::string& s, const DSchema& schema);

struct CanonicalContext {
    std::string source;
    /// Body: atoms not readable by s. Free variables: the frontier.
    ConjunctiveQuery query;
    std::vector<Term> frontier;
    /// The body is empty; the context is the always-true query.
    bool degenerate = false;
};

CanonicalContext canonical_context(const ConjunctiveQuery& q, const std::string& s, const DSchema& schema);

DView canonical_dview(const ConjunctiveQuery& q, const DSchema& schema, const std::string& name = "canonical");

/// Every source has at most one source-join variable.
bool is_monadic_frontier(const ConjunctiveQuery& q, const DSchema& schema);

}  // namespace viewforge
