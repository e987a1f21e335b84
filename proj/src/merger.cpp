#include "gna/merger.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <utility>

#include "gna/errors.hpp"
#include "gna/graph_algorithms.hpp"

namespace gna {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

// Draws one distinct directed tie (origin from `origin_weights` over the
// origin id range, destination per `pick_dest`) and inserts it with a fresh
// uniform strength.  Gives up with InitError after `max_attempts` rejected
// duplicates.
template <typename PickOrigin, typename PickDest>
void add_distinct_tie(MergerState& st, Rng& rng, PickOrigin pick_origin,
                      PickDest pick_dest, std::size_t max_attempts,
                      const std::string& what) {
    for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
        std::size_t origin = pick_origin(rng);
        std::size_t dest = pick_dest(rng);
        if (origin == dest || st.has_tie(origin, dest)) continue;
        st.set_tie(origin, dest, rng.real_in(0.01, 0.99));
        return;
    }
    throw InitError("could not place a distinct " + what +
                    " tie: quota appears unreachable");
}

}  // namespace

void MergerParams::validate() const {
    if (n_per_firm < 1) throw ConfigError("n_per_firm must be at least 1");
    if (dims < 1) throw ConfigError("cultural dimension must be at least 1");
    if (!std::isfinite(d_c) || d_c <= 0.0)
        throw ConfigError("d_c must be positive");
    if (!finite_nonneg(noise_sd)) throw ConfigError("noise_sd must be >= 0");
    if (!finite_nonneg(center_separation))
        throw ConfigError("center_separation must be >= 0");
    if (!finite_nonneg(w)) throw ConfigError("within-firm concentration w must be >= 0");
    if (!finite_nonneg(b)) throw ConfigError("between-firm concentration b must be >= 0");
}

double cultural_distance(const std::vector<double>& a,
                         const std::vector<double>& b) {
    if (a.size() != b.size())
        throw DomainError("cultural vectors have different dimensions");
    double sq = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

std::size_t MergerState::tie_count() const {
    std::size_t total = 0;
    for (const auto& row : out_ties) total += row.size();
    return total;
}

bool MergerState::has_tie(std::size_t origin, std::size_t dest) const {
    return origin < out_ties.size() && out_ties[origin].count(dest) > 0;
}

double MergerState::tie_strength(std::size_t origin, std::size_t dest) const {
    if (origin >= out_ties.size()) return 0.0;
    auto it = out_ties[origin].find(dest);
    return it == out_ties[origin].end() ? 0.0 : it->second;
}

void MergerState::set_tie(std::size_t origin, std::size_t dest, double strength) {
    out_ties[origin][dest] = strength;
    in_ties[dest][origin] = strength;
}

void MergerState::remove_tie(std::size_t origin, std::size_t dest) {
    out_ties[origin].erase(dest);
    in_ties[dest].erase(origin);
}

MergerState init_population(const MergerParams& params, Rng& rng) {
    params.validate();
    const std::size_t n = params.n_per_firm;
    const std::size_t total = 2 * n;
    if (params.within_ties > n * (n - 1))
        throw InitError("within-firm tie quota exceeds the number of distinct pairs");
    if (params.between_ties > n * n)
        throw InitError("between-firm tie quota exceeds the number of distinct pairs");

    MergerState st;
    st.params = params;
    st.people.resize(total);
    st.out_ties.assign(total, {});
    st.in_ties.assign(total, {});

    // Cultural vectors: firm centers sit `center_separation` apart along the
    // first axis; every component gets independent gaussian noise.
    for (std::size_t id = 0; id < total; ++id) {
        Individual& person = st.people[id];
        person.id = id;
        person.firm = id < n ? 0 : 1;
        person.rank = (id < n ? id : id - n) + 1;
        person.culture.resize(params.dims);
        const double center0 = person.firm == 0 ? 0.0 : params.center_separation;
        for (std::size_t k = 0; k < params.dims; ++k) {
            const double center = k == 0 ? center0 : 0.0;
            person.culture[k] = rng.normal(center, params.noise_sd);
        }
    }

    const std::size_t attempt_cap = 1000 * (params.within_ties + params.between_ties) + 100000;

    // Within-firm ties: destination uniform, source weighted by (rank/n)^w.
    std::vector<double> source_weights(n);
    for (std::size_t i = 0; i < n; ++i)
        source_weights[i] = std::pow(static_cast<double>(i + 1) / static_cast<double>(n),
                                     params.w);
    for (int firm = 0; firm < 2; ++firm) {
        const std::size_t base = firm == 0 ? 0 : n;
        auto pick_origin = [&](Rng& r) { return base + r.weighted(source_weights); };
        auto pick_dest = [&](Rng& r) { return base + r.below(n); };
        for (std::size_t t = 0; t < params.within_ties; ++t)
            add_distinct_tie(st, rng, pick_origin, pick_dest, attempt_cap,
                             "within-firm");
    }

    // Between-firm ties: both endpoints weighted by (within-firm harmonic
    // closeness)^b, computed on each firm's just-built undirected view.
    std::vector<std::vector<double>> closeness_weights(2);
    for (int firm = 0; firm < 2; ++firm) {
        const std::size_t base = firm == 0 ? 0 : n;
        SimpleGraph g(n);
        for (std::size_t local = 0; local < n; ++local)
            for (const auto& [dest, strength] : st.out_ties[base + local]) {
                (void)strength;
                g.add_edge(local, dest - base);
            }
        std::vector<double> c = closeness_centrality(g, /*harmonic=*/true);
        std::vector<double>& weights = closeness_weights[firm];
        weights.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double value = std::pow(c[i], params.b);
            if (!(value > 0.0) || !std::isfinite(value)) value = 1e-9;
            weights[i] = value;
        }
    }
    for (int firm = 0; firm < 2; ++firm) {
        const std::size_t from_base = firm == 0 ? 0 : n;
        const std::size_t to_base = firm == 0 ? n : 0;
        auto pick_origin = [&](Rng& r) {
            return from_base + r.weighted(closeness_weights[firm]);
        };
        auto pick_dest = [&](Rng& r) {
            return to_base + r.weighted(closeness_weights[1 - firm]);
        };
        for (std::size_t t = 0; t < params.between_ties; ++t)
            add_distinct_tie(st, rng, pick_origin, pick_dest, attempt_cap,
                             "between-firm");
    }
    return st;
}

double acceptance_probability(double distance, double d_c) {
    if (!(distance >= 0.0))
        throw DomainError("cultural distance must be non-negative");
    if (!(d_c > 0.0)) throw DomainError("d_c must be positive");
    return std::pow(0.5, distance / d_c);
}

double update_tie(double strength, bool accepted) {
    if (!(strength > 0.0) || !(strength < 1.0))
        throw DomainError("tie strength must lie strictly inside (0,1)");
    const double logit = std::log(strength / (1.0 - strength));
    const double moved = accepted ? logit + 1.0 : logit - 1.0;
    const double updated = 1.0 / (1.0 + std::exp(-moved));
    // Long accept streaks would otherwise round the logistic onto an
    // endpoint, leaving a stored strength this function must reject.
    return std::clamp(updated, 1e-9, 1.0 - 1e-9);
}

namespace {

// Weakly-connected component of `focal`, ids ascending.
std::vector<std::size_t> component_of(const MergerState& st, std::size_t focal) {
    std::vector<char> seen(st.people.size(), 0);
    std::deque<std::size_t> queue{focal};
    seen[focal] = 1;
    while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        for (const auto& [v, s] : st.out_ties[u]) {
            (void)s;
            if (!seen[v]) { seen[v] = 1; queue.push_back(v); }
        }
        for (const auto& [v, s] : st.in_ties[u]) {
            (void)s;
            if (!seen[v]) { seen[v] = 1; queue.push_back(v); }
        }
    }
    std::vector<std::size_t> members;
    for (std::size_t id = 0; id < seen.size(); ++id)
        if (seen[id]) members.push_back(id);
    return members;
}

}  // namespace

void individual_action(MergerState& st, std::size_t focal, Rng& rng) {
    if (focal >= st.people.size()) throw DomainError("focal id out of range");
    Individual& me = st.people[focal];

    std::size_t partner = focal;
    const bool via_neighbors = rng.chance(0.99) && !st.in_ties[focal].empty();
    if (via_neighbors) {
        std::vector<std::size_t> origins;
        std::vector<double> weights;
        origins.reserve(st.in_ties[focal].size());
        for (const auto& [origin, strength] : st.in_ties[focal]) {
            origins.push_back(origin);
            weights.push_back(strength);
        }
        partner = origins[rng.weighted(weights)];
    } else {
        std::vector<std::size_t> mates = component_of(st, focal);
        mates.erase(std::remove(mates.begin(), mates.end(), focal), mates.end());
        if (mates.empty()) return;  // isolated individual: nothing to pull from
        partner = mates[rng.below(mates.size())];
        if (!st.has_tie(partner, focal)) st.set_tie(partner, focal, 0.01);
    }

    const Individual& other = st.people[partner];
    const double distance = cultural_distance(me.culture, other.culture);
    const double strength = st.tie_strength(partner, focal);
    const bool accepted =
        rng.chance(acceptance_probability(distance, st.params.d_c));
    if (accepted)
        for (std::size_t k = 0; k < me.culture.size(); ++k)
            me.culture[k] = (me.culture[k] + other.culture[k]) / 2.0;
    const double updated = update_tie(strength, accepted);
    if (updated < 0.01)
        st.remove_tie(partner, focal);
    else
        st.set_tie(partner, focal, updated);
}

MergerMetrics merger_metrics(const MergerState& st) {
    MergerMetrics m;
    const std::size_t total = st.people.size();
    if (total == 0) return m;

    SimpleGraph g(total);
    for (std::size_t origin = 0; origin < total; ++origin)
        for (const auto& [dest, strength] : st.out_ties[origin]) {
            (void)strength;
            g.add_edge(origin, dest);
        }
    std::vector<std::size_t> members = largest_component(g);
    std::vector<char> inside(total, 0);
    for (std::size_t id : members) inside[id] = 1;
    m.turnover = static_cast<double>(total - members.size());

    // Compact the component for the betweenness pass.
    std::vector<std::size_t> compact(total, 0);
    for (std::size_t i = 0; i < members.size(); ++i) compact[members[i]] = i;
    SimpleGraph sub(members.size());
    for (std::size_t origin = 0; origin < total; ++origin) {
        if (!inside[origin]) continue;
        for (const auto& [dest, strength] : st.out_ties[origin]) {
            (void)strength;
            if (inside[dest]) sub.add_edge(compact[origin], compact[dest]);
        }
    }
    const auto betweenness = edge_betweenness(sub);

    for (std::size_t origin = 0; origin < total; ++origin) {
        if (!inside[origin]) continue;
        for (const auto& [dest, strength] : st.out_ties[origin]) {
            if (!inside[dest]) continue;
            const double d = cultural_distance(st.people[origin].culture,
                                               st.people[dest].culture);
            m.conflict += d * strength;
            const auto key = std::minmax(compact[origin], compact[dest]);
            auto it = betweenness.find({key.first, key.second});
            if (it != betweenness.end()) m.ineffectiveness += d * it->second;
        }
    }

    double cross_sum = 0.0;
    std::size_t cross_pairs = 0;
    for (std::size_t i = 0; i < members.size(); ++i)
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const Individual& a = st.people[members[i]];
            const Individual& b = st.people[members[j]];
            if (a.firm == b.firm) continue;
            cross_sum += cultural_distance(a.culture, b.culture);
            ++cross_pairs;
        }
    m.avg_cross_distance =
        cross_pairs ? cross_sum / static_cast<double>(cross_pairs)
                    : std::numeric_limits<double>::quiet_NaN();
    return m;
}

MergerRun run_merger(const MergerParams& params, Rng& rng, bool record_series) {
    params.validate();
    MergerRun out;
    MergerState st = init_population(params, rng);
    out.series.push_back(merger_metrics(st));
    out.series_iteration.push_back(0);

    std::vector<std::size_t> order(st.people.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t iter = 1; iter <= params.iterations; ++iter) {
        if (params.shuffle_order)
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t id : order) individual_action(st, id, rng);
        if (record_series) {
            out.series.push_back(merger_metrics(st));
            out.series_iteration.push_back(iter);
        }
    }
    if (!record_series && params.iterations > 0) {
        out.series.push_back(merger_metrics(st));
        out.series_iteration.push_back(params.iterations);
    }
    out.final_state = std::move(st);
    return out;
}

namespace {

std::size_t sweep_worker_count(std::size_t tasks) {
    std::size_t workers = 0;
    if (const char* env = std::getenv("GNA_WORKERS")) {
        std::size_t parsed = 0;
        auto res = std::from_chars(env, env + std::string(env).size(), parsed);
        if (res.ec == std::errc() && parsed >= 1) workers = parsed;
    }
    if (workers == 0) {
        workers = std::thread::hardware_concurrency();
        if (workers == 0) workers = 1;
    }
    return std::max<std::size_t>(1, std::min(workers, std::max<std::size_t>(tasks, 1)));
}

}  // namespace

SweepResult run_sweep(const SweepOptions& options) {
    options.base.validate();
    const std::size_t tasks = options.conditions.size() * options.runs;
    SweepResult result;
    if (tasks == 0) return result;
    std::vector<std::vector<SweepRow>> per_task(tasks);
    std::vector<MergerState> finals(options.keep_final_states ? tasks : 0);

    std::atomic<std::size_t> cursor{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        for (;;) {
            const std::size_t task = cursor.fetch_add(1);
            if (task >= tasks) return;
            try {
                const SweepCondition& cond = options.conditions[task / options.runs];
                const std::size_t run_index = task % options.runs;
                MergerParams params = options.base;
                params.w = cond.w;
                params.b = cond.b;
                Rng rng = Rng::derive(options.seed, task);
                MergerRun run = run_merger(params, rng, options.record_series);
                std::vector<SweepRow>& rows = per_task[task];
                rows.reserve(run.series.size());
                for (std::size_t j = 0; j < run.series.size(); ++j)
                    rows.push_back(SweepRow{cond.w, cond.b, run_index,
                                            run.series_iteration[j], run.series[j]});
                if (options.keep_final_states)
                    finals[task] = std::move(run.final_state);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t workers = sweep_worker_count(tasks);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (auto& chunk : per_task)
        for (auto& row : chunk) result.rows.push_back(std::move(row));
    result.final_states = std::move(finals);
    return result;
}

std::string serialize_merger_state(const MergerState& st) {
    std::ostringstream out;
    out << "merger-state v1\n";
    out << "n-per-firm " << st.params.n_per_firm << "\n";
    out << "dims " << st.params.dims << "\n";
    out << "d-c " << format_double(st.params.d_c) << "\n";
    for (const auto& person : st.people) {
        out << "person " << person.id << " ; " << person.firm << " ; "
            << person.rank << " ; ";
        for (std::size_t k = 0; k < person.culture.size(); ++k) {
            if (k) out << ",";
            out << format_double(person.culture[k]);
        }
        out << "\n";
    }
    for (std::size_t origin = 0; origin < st.out_ties.size(); ++origin)
        for (const auto& [dest, strength] : st.out_ties[origin])
            out << "tie " << origin << " ; " << dest << " ; "
                << format_double(strength) << "\n";
    out << "end\n";
    return out.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    auto trim = [](const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        std::size_t e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    for (char c : line) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

template <typename T>
T parse_number(const std::string& cell, const std::string& what) {
    T v{};
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw ParseError("bad " + what + " '" + cell + "'");
    return v;
}

}  // namespace

MergerState parse_merger_state(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "merger-state v1")
        throw ParseError("expected 'merger-state v1' header");
    MergerState st;
    st.params.w = 0.0;
    st.params.b = 0.0;
    bool saw_end = false;
    std::size_t person_cursor = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line == "end") {
            saw_end = true;
            break;
        }
        std::size_t sp = line.find(' ');
        if (sp == std::string::npos)
            throw ParseError("malformed record '" + line + "'");
        const std::string tag = line.substr(0, sp);
        const std::string rest = line.substr(sp + 1);
        if (tag == "n-per-firm") {
            st.params.n_per_firm = parse_number<std::size_t>(rest, "n-per-firm");
        } else if (tag == "dims") {
            st.params.dims = parse_number<std::size_t>(rest, "dims");
        } else if (tag == "d-c") {
            st.params.d_c = parse_number<double>(rest, "d-c");
        } else if (tag == "person") {
            auto cells = split_fields(rest, ';');
            if (cells.size() != 4)
                throw ParseError("person record needs 4 columns");
            Individual person;
            person.id = parse_number<std::size_t>(cells[0], "person id");
            person.firm = static_cast<int>(parse_number<long>(cells[1], "firm"));
            person.rank = parse_number<std::size_t>(cells[2], "rank");
            for (const auto& cell : split_fields(cells[3], ','))
                person.culture.push_back(parse_number<double>(cell, "coordinate"));
            if (!st.out_ties.empty())
                throw ParseError("person records must precede tie records");
            if (person.id != person_cursor)
                throw SchemaError("person ids must be dense and ascending");
            ++person_cursor;
            st.people.push_back(std::move(person));
        } else if (tag == "tie") {
            auto cells = split_fields(rest, ';');
            if (cells.size() != 3) throw ParseError("tie record needs 3 columns");
            const std::size_t origin = parse_number<std::size_t>(cells[0], "tie origin");
            const std::size_t dest = parse_number<std::size_t>(cells[1], "tie destination");
            const double strength = parse_number<double>(cells[2], "tie strength");
            if (origin >= st.people.size() || dest >= st.people.size())
                throw SchemaError("tie endpoint refers to an unknown person");
            if (origin == dest) throw SchemaError("self-ties are not allowed");
            if (!(strength > 0.0) || !(strength < 1.0))
                throw SchemaError("tie strength must lie inside (0,1)");
            if (st.out_ties.empty()) st.out_ties.assign(st.people.size(), {});
            if (st.in_ties.empty()) st.in_ties.assign(st.people.size(), {});
            st.set_tie(origin, dest, strength);
        } else {
            throw ParseError("unknown record type '" + tag + "'");
        }
    }
    if (!saw_end) throw ParseError("missing 'end' record");
    if (st.people.size() != 2 * st.params.n_per_firm)
        throw SchemaError("person count does not match n-per-firm");
    const std::size_t n = st.params.n_per_firm;
    for (const auto& person : st.people) {
        const int expected_firm = person.id < n ? 0 : 1;
        const std::size_t expected_rank = (person.id < n ? person.id : person.id - n) + 1;
        if (person.firm != expected_firm || person.rank != expected_rank)
            throw SchemaError("person " + std::to_string(person.id) +
                              " has inconsistent firm or rank");
        if (person.culture.size() != st.params.dims)
            throw SchemaError("person " + std::to_string(person.id) +
                              " has the wrong cultural dimension");
    }
    if (st.out_ties.empty()) st.out_ties.assign(st.people.size(), {});
    if (st.in_ties.empty()) st.in_ties.assign(st.people.size(), {});
    return st;
}

std::string sweep_csv_header() {
    return "w,b,run,iteration,cross_distance,turnover,conflict,ineffectiveness";
}

std::string sweep_csv_row(const SweepRow& row) {
    std::ostringstream out;
    out << format_double(row.w) << ',' << format_double(row.b) << ',' << row.run
        << ',' << row.iteration << ',' << format_double(row.metrics.avg_cross_distance)
        << ',' << format_double(row.metrics.turnover) << ','
        << format_double(row.metrics.conflict) << ','
        << format_double(row.metrics.ineffectiveness);
    return out.str();
}

}  // namespace gna
