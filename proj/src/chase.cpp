#include "viewforge/chase.hpp"

#include <deque>
#include <functional>

#include "viewforge/json_io.hpp"

namespace viewforge {

EqualityClash::EqualityClash(Term a, Term b)
    : std::runtime_error("equality rule equates distinct constants " + a.to_string() + " and " + b.to_string()),
      lhs_(std::move(a)),
      rhs_(std::move(b)) {}

namespace {

struct Trigger {
    std::size_t rule = 0;
    Assignment binding;
};

Term image(const Term& t, const Assignment& h) {
    auto it = h.find(t);
    return it == h.end() ? t : it->second;
}

bool tgd_active(const ExistentialRule& rule, const Assignment& binding, const Instance& inst) {
    return !find_homomorphism(rule.head, inst, binding, {.map_nulls = false}).has_value();
}

bool body_still_matches(const ExistentialRule& rule, const Assignment& binding, const Instance& inst) {
    return is_homomorphism(rule.body, inst, binding);
}

class Chaser {
  public:
    Chaser(const Instance& start, std::span<const ExistentialRule> rules, const ChaseConfig& cfg, NullPool& pool)
        : rules_(rules), cfg_(cfg), pool_(pool), inst_(start) {
        for (const auto& r : rules_) {
            r.check();
            body_vars_.push_back(r.body_vars());
        }
    }

    ChaseResult run() {
        enqueue_all();
        ChaseResult result;
        std::size_t steps = 0;
        while (!queue_.empty()) {
            if (overflow_) {
                result.pending_triggers = queue_.size();
                result.instance = inst_;
                result.trace = std::move(trace_);
                return result;
            }
            Trigger trig = std::move(queue_.front());
            queue_.pop_front();
            const auto& rule = rules_[trig.rule];
            if (!body_still_matches(rule, trig.binding, inst_)) continue;
            if (rule.is_tgd()) {
                if (!tgd_active(rule, trig.binding, inst_)) continue;
                if (steps >= cfg_.max_steps) {
                    result.pending_triggers = queue_.size() + 1;
                    result.instance = inst_;
                    result.trace = std::move(trace_);
                    return result;
                }
                ++steps;
                apply_tgd(trig, steps);
            } else {
                Term a = image(rule.equality->first, trig.binding);
                Term b = image(rule.equality->second, trig.binding);
                if (a == b) continue;
                if (steps >= cfg_.max_steps) {
                    result.pending_triggers = queue_.size() + 1;
                    result.instance = inst_;
                    result.trace = std::move(trace_);
                    return result;
                }
                ++steps;
                apply_equality(trig, a, b);
            }
        }
        result.completed = true;
        result.instance = std::move(inst_);
        result.trace = std::move(trace_);
        return result;
    }

  private:
    void push(std::size_t rule, const Assignment& binding) {
        std::vector<Term> key;
        key.reserve(body_vars_[rule].size());
        for (const auto& v : body_vars_[rule]) key.push_back(binding.at(v));
        if (!seen_.insert({rule, std::move(key)}).second) return;
        queue_.push_back({rule, binding});
        if (queue_.size() > cfg_.max_pending) overflow_ = true;
    }

    void enqueue_all() {
        for (std::size_t r = 0; r < rules_.size(); ++r)
            for_each_homomorphism(rules_[r].body, inst_, {}, {.map_nulls = false}, [&](const Assignment& h) {
                push(r, h);
                return !overflow_;
            });
    }

    void enqueue_delta(const std::vector<Atom>& fresh_facts) {
        for (std::size_t r = 0; r < rules_.size(); ++r) {
            const auto& body = rules_[r].body;
            for (const auto& fact : fresh_facts) {
                for (const auto& atom : body) {
                    if (atom.relation != fact.relation || atom.args.size() != fact.args.size()) continue;
                    Assignment pinned;
                    bool ok = true;
                    for (std::size_t k = 0; k < atom.args.size() && ok; ++k) {
                        const auto& t = atom.args[k];
                        if (t.is_variable()) {
                            auto [it, inserted] = pinned.emplace(t, fact.args[k]);
                            ok = inserted || it->second == fact.args[k];
                        } else {
                            ok = t == fact.args[k];
                        }
                    }
                    if (!ok) continue;
                    for_each_homomorphism(body, inst_, pinned, {.map_nulls = false}, [&](const Assignment& h) {
                        push(r, h);
                        return !overflow_;
                    });
                }
            }
        }
    }

    void apply_tgd(const Trigger& trig, std::size_t step) {
        const auto& rule = rules_[trig.rule];
        Assignment h = trig.binding;
        for (const auto& z : rule.existential_vars())
            h[z] = pool_.fresh("n_" + cfg_.null_prefix + std::to_string(step) + "_" + z.name());
        ChaseStep record{trig.rule, rule.name, trig.binding, {}, std::nullopt};
        for (const auto& a : rule.head) {
            Atom fact = substitute(a, h);
            if (inst_.add(fact)) record.emitted.push_back(fact);
        }
        enqueue_delta(record.emitted);
        trace_.push_back(std::move(record));
    }

    void apply_equality(const Trigger& trig, const Term& a, const Term& b) {
        const Term* removed = nullptr;
        const Term* kept = nullptr;
        if (a.is_null() && b.is_null()) {
            removed = a.null_id() > b.null_id() ? &a : &b;
            kept = removed == &a ? &b : &a;
        } else if (a.is_null()) {
            removed = &a;
            kept = &b;
        } else if (b.is_null()) {
            removed = &b;
            kept = &a;
        } else {
            throw EqualityClash(a, b);
        }
        inst_ = inst_.substitute(*removed, *kept);
        trace_.push_back({trig.rule, rules_[trig.rule].name, trig.binding, {}, std::make_pair(*removed, *kept)});
        queue_.clear();
        overflow_ = false;
        seen_.clear();
        enqueue_all();
    }

    std::span<const ExistentialRule> rules_;
    const ChaseConfig& cfg_;
    NullPool& pool_;
    Instance inst_;
    std::vector<std::vector<Term>> body_vars_;
    std::deque<Trigger> queue_;
    std::set<std::pair<std::size_t, std::vector<Term>>> seen_;
    std::vector<ChaseStep> trace_;
    bool overflow_ = false;
};

}  // namespace

ChaseResult run_chase(const Instance& start, std::span<const ExistentialRule> rules, const ChaseConfig& cfg,
                      NullPool* pool) {
    if (cfg.max_steps == 0) throw InputError("chase fuel must be at least 1");
    NullPool local;
    Chaser chaser(start, rules, cfg, pool ? *pool : local);
    return chaser.run();
}

Instance replay_trace(const Instance& start, std::span<const ChaseStep> trace) {
    Instance inst = start;
    for (const auto& step : trace) {
        for (const auto& f : step.emitted) inst.add(f);
        if (step.merged) inst = inst.substitute(step.merged->first, step.merged->second);
    }
    return inst;
}

bool satisfies(const Instance& i, std::span<const ExistentialRule> rules) {
    for (const auto& rule : rules) {
        bool ok = true;
        for_each_homomorphism(rule.body, i, {}, {.map_nulls = false}, [&](const Assignment& h) {
            if (rule.is_tgd()) {
                ok = !tgd_active(rule, h, i);
            } else {
                ok = image(rule.equality->first, h) == image(rule.equality->second, h);
            }
            return ok;
        });
        if (!ok) return false;
    }
    return true;
}

WeakAcyclicityReport is_weakly_acyclic(std::span<const ExistentialRule> rules) {
    WeakAcyclicityReport report;
    for (const auto& rule : rules) {
        if (!rule.is_tgd()) throw InputError("weak acyclicity is defined for TGDs only; '" + rule.name + "' is an equality rule");
        auto frontier = rule.frontier();
        auto existential = rule.existential_vars();
        for (const auto& x : frontier) {
            std::vector<Position> body_pos;
            for (const auto& a : rule.body)
                for (std::size_t k = 0; k < a.args.size(); ++k)
                    if (a.args[k] == x) body_pos.push_back({a.relation, k});
            for (const auto& a : rule.head)
                for (std::size_t k = 0; k < a.args.size(); ++k) {
                    const auto& t = a.args[k];
                    bool normal = t == x;
                    bool special = std::find(existential.begin(), existential.end(), t) != existential.end();
                    if (!normal && !special) continue;
                    for (const auto& p : body_pos) report.edges.push_back({p, {a.relation, k}, special, rule.name});
                }
        }
    }
    // A special edge u->v lies on a cycle iff u is reachable from v.
    std::map<Position, std::vector<Position>> adj;
    for (const auto& e : report.edges) adj[e.from].push_back(e.to);
    auto reaches = [&](const Position& from, const Position& target) {
        std::set<Position> seen{from};
        std::vector<Position> stack{from};
        while (!stack.empty()) {
            Position p = stack.back();
            stack.pop_back();
            if (p == target) return true;
            for (const auto& q : adj[p])
                if (seen.insert(q).second) stack.push_back(q);
        }
        return false;
    };
    for (const auto& e : report.edges)
        if (e.special && reaches(e.to, e.from)) report.offending.push_back(e);
    report.weakly_acyclic = report.offending.empty();
    return report;
}

std::string trace_to_jsonl(std::span<const ChaseStep> trace) {
    std::string out;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& s = trace[i];
        nlohmann::ordered_json j;
        j["step"] = i + 1;
        j["rule"] = s.rule_name;
        j["trigger"] = assignment_to_json(s.trigger);
        if (s.merged) {
            j["merged"] = {term_to_json(s.merged->first), term_to_json(s.merged->second)};
        } else {
            nlohmann::ordered_json facts = nlohmann::ordered_json::array();
            for (const auto& f : s.emitted) facts.push_back(atom_to_json(f));
            j["emitted"] = facts;
        }
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace viewforge
