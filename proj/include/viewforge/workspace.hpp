#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "viewforge/model.hpp"
#include "viewforge/view.hpp"

namespace viewforge {

struct Diagnostic {
    int line = 0;
    int column = 0;
    std::string message;
    std::string hint;
    std::string to_string() const;
};

class ParseError : public InputError {
  public:
    explicit ParseError(std::vector<Diagnostic> diags);
    const std::vector<Diagnostic>& diagnostics() const { return diags_; }

  private:
    std::vector<Diagnostic> diags_;
};

struct Workspace {
    DSchema schema;
    std::vector<ConjunctiveQuery> queries;
    std::vector<ConjunctiveQuery> secrets;
    std::vector<ExistentialRule> rules;
    std::vector<View> views;
    std::vector<DView> dviews;
    std::vector<std::pair<std::string, DInstance>> instances;

    /// Lookups throw InputError naming the missing object.
    const ConjunctiveQuery& query(const std::string& name) const;
    const ConjunctiveQuery& secret(const std::string& name) const;
    const View& view(const std::string& name) const;
    const DView& dview(const std::string& name) const;
    const DInstance& instance(const std::string& name) const;

    friend bool operator==(const Workspace&, const Workspace&) = default;
};

struct ParseResult {
    Workspace workspace;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

/// Collects every diagnostic instead of stopping at the first.
ParseResult parse_workspace(std::string_view text);
/// Throws ParseError on any diagnostic.
Workspace load_workspace(std::string_view text);
Workspace load_workspace_file(const std::string& path);

/// Normalized text; parsing it gives back an equal workspace.
std::string print_workspace(const Workspace& ws);

/// Parses a single atom list such as "R(x,y), S(y)" against the schema.
std::vector<Atom> parse_atoms(std::string_view text, const DSchema& schema);

}  // namespace viewforge
