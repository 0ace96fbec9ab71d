#include "viewforge/homomorphism.hpp"

#include <algorithm>
#include <unordered_map>

namespace viewforge {

namespace {

// Search over the target's tuple sets, narrowed through its column index
// once some argument of an atom is bound. Candidates are visited in tuple
// order whatever the access path.
class Search {
  public:
    Search(std::span<const Atom> src, const Instance& dst, const Assignment& pinned, HomOptions opts)
        : opts_(opts), pinned_(pinned), dst_(dst) {
        for (const auto& atom : src) {
            CompiledAtom ca;
            ca.relation = &atom.relation;
            ca.tuples = &dst.tuples(atom.relation);
            for (const auto& t : atom.args) ca.args.push_back(compile_term(t));
            atoms_.push_back(std::move(ca));
        }
        value_.assign(flexible_.size(), nullptr);
        for (std::size_t v = 0; v < flexible_.size(); ++v) {
            auto it = pinned.find(flexible_[v]);
            if (it != pinned.end()) value_[v] = &it->second;
        }
        if (opts_.injective)
            for (const auto* x : value_)
                if (x) ++used_[*x];
        order_atoms();
    }

    void run(const std::function<bool(const Assignment&)>& visit) {
        if (opts_.injective) {
            for (const auto& [t, n] : used_)
                if (n > 1) return;
        }
        visit_ = &visit;
        stop_ = false;
        descend(0);
    }

  private:
    // Argument encoding: >= 0 flexible slot index, < 0 fixed term -(idx+1).
    struct CompiledAtom {
        const std::string* relation = nullptr;
        std::vector<int> args;
        const TupleSet* tuples = nullptr;
    };

    int compile_term(const Term& t) {
        bool flexible = t.is_variable() || (t.is_null() && opts_.map_nulls) || pinned_.count(t) > 0;
        if (flexible) {
            auto it = slot_.find(t);
            if (it != slot_.end()) return it->second;
            int idx = static_cast<int>(flexible_.size());
            flexible_.push_back(t);
            slot_[t] = idx;
            return idx;
        }
        fixed_.push_back(t);
        return -static_cast<int>(fixed_.size());
    }

    const Term& fixed(int x) const { return fixed_[static_cast<std::size_t>(-x - 1)]; }

    void order_atoms() {
        std::vector<bool> done(atoms_.size(), false);
        std::vector<bool> bound(flexible_.size(), false);
        for (std::size_t v = 0; v < flexible_.size(); ++v) bound[v] = value_[v] != nullptr;
        for (std::size_t step = 0; step < atoms_.size(); ++step) {
            int best = -1;
            long best_score = -1;
            for (std::size_t a = 0; a < atoms_.size(); ++a) {
                if (done[a]) continue;
                long score = 0;
                for (int x : atoms_[a].args)
                    if (x < 0 || bound[x]) ++score;
                score = score * 1000000 - static_cast<long>(std::min<std::size_t>(atoms_[a].tuples->size(), 999999));
                if (best < 0 || score > best_score) {
                    best = static_cast<int>(a);
                    best_score = score;
                }
            }
            done[best] = true;
            order_.push_back(best);
            for (int x : atoms_[best].args)
                if (x >= 0) bound[x] = true;
        }
    }

    // Binds the unbound arguments of atom to row and recurses.
    void try_row(std::size_t depth, const CompiledAtom& atom, const Tuple& row) {
        if (row.size() != atom.args.size()) return;
        std::vector<int> newly;
        bool ok = true;
        for (std::size_t k = 0; k < row.size() && ok; ++k) {
            int x = atom.args[k];
            if (x < 0) {
                ok = fixed(x) == row[k];
            } else if (value_[x]) {
                ok = *value_[x] == row[k];
            } else if (opts_.injective && used_[row[k]] > 0) {
                ok = false;
            } else {
                value_[x] = &row[k];
                if (opts_.injective) ++used_[row[k]];
                newly.push_back(x);
            }
        }
        if (ok) descend(depth + 1);
        for (int x : newly) {
            if (opts_.injective) --used_[*value_[x]];
            value_[x] = nullptr;
        }
    }

    void descend(std::size_t depth) {
        if (stop_) return;
        if (depth == order_.size()) {
            Assignment out = pinned_;
            for (std::size_t v = 0; v < flexible_.size(); ++v)
                if (value_[v]) out[flexible_[v]] = *value_[v];
            if (!(*visit_)(out)) stop_ = true;
            return;
        }
        const auto& atom = atoms_[order_[depth]];
        if (atom.tuples->empty()) return;

        // Fully bound atoms are a membership test; otherwise scan the
        // narrowest column among the bound positions.
        Tuple probe;
        probe.reserve(atom.args.size());
        const Instance::Column* narrowest = nullptr;
        bool all_bound = true;
        for (std::size_t k = 0; k < atom.args.size(); ++k) {
            int x = atom.args[k];
            const Term* t = x < 0 ? &fixed(x) : value_[x];
            if (!t) {
                all_bound = false;
                continue;
            }
            probe.push_back(*t);
            const auto* col = dst_.column(*atom.relation, k, *t);
            if (!col) return;
            if (!narrowest || col->size() < narrowest->size()) narrowest = col;
        }
        if (all_bound) {
            auto it = atom.tuples->find(probe);
            if (it != atom.tuples->end()) try_row(depth, atom, *it);
            return;
        }
        if (narrowest) {
            for (const Tuple* row : *narrowest) {
                try_row(depth, atom, *row);
                if (stop_) return;
            }
            return;
        }
        for (const auto& row : *atom.tuples) {
            try_row(depth, atom, row);
            if (stop_) return;
        }
    }

    HomOptions opts_;
    const Assignment& pinned_;
    const Instance& dst_;
    std::vector<CompiledAtom> atoms_;
    std::vector<Term> flexible_;
    std::vector<Term> fixed_;
    std::unordered_map<Term, int> slot_;
    std::vector<const Term*> value_;
    std::unordered_map<Term, int> used_;
    std::vector<int> order_;
    bool stop_ = false;
    const std::function<bool(const Assignment&)>* visit_ = nullptr;
};

}  // namespace

void for_each_homomorphism(std::span<const Atom> src, const Instance& dst, const Assignment& pinned,
                           HomOptions opts, const std::function<bool(const Assignment&)>& visit) {
    Search search(src, dst, pinned, opts);
    search.run(visit);
}

std::optional<Assignment> find_homomorphism(std::span<const Atom> src, const Instance& dst,
                                            const Assignment& pinned, HomOptions opts) {
    std::optional<Assignment> found;
    for_each_homomorphism(src, dst, pinned, opts, [&](const Assignment& h) {
        found = h;
        return false;
    });
    return found;
}

TupleSet enumerate_matches(const ConjunctiveQuery& q, const Instance& i) {
    TupleSet out;
    for_each_homomorphism(q.atoms, i, {}, {.map_nulls = false}, [&](const Assignment& h) {
        Tuple t;
        t.reserve(q.free_vars.size());
        for (const auto& v : q.free_vars) t.push_back(h.at(v));
        out.insert(std::move(t));
        return !q.free_vars.empty();
    });
    return out;
}

bool holds(const ConjunctiveQuery& q, const Instance& i) {
    return find_homomorphism(q.atoms, i, {}, {.map_nulls = false}).has_value();
}

std::optional<Assignment> find_cq_homomorphism(const ConjunctiveQuery& from, const ConjunctiveQuery& to) {
    if (from.free_vars.size() != to.free_vars.size()) return std::nullopt;
    Assignment pinned;
    for (std::size_t k = 0; k < from.free_vars.size(); ++k) {
        auto target = frozen(to.free_vars[k]);
        auto [it, inserted] = pinned.emplace(from.free_vars[k], target);
        if (!inserted && it->second != target) return std::nullopt;
    }
    return find_homomorphism(from.atoms, build_canondb(to), pinned, {.map_nulls = false});
}

bool hom_equivalent(const ConjunctiveQuery& a, const ConjunctiveQuery& b) {
    return find_cq_homomorphism(a, b).has_value() && find_cq_homomorphism(b, a).has_value();
}

bool is_homomorphism(std::span<const Atom> src, const Instance& dst, const Assignment& h) {
    for (const auto& a : src) {
        Atom image = a;
        for (auto& t : image.args) {
            auto it = h.find(t);
            if (it != h.end()) {
                t = it->second;
            } else if (t.is_variable()) {
                return false;
            }
        }
        if (!dst.contains(image)) return false;
    }
    return true;
}

}  // namespace viewforge
