//---------------------------------------------------------------------------//
// Copyright perpsim contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file config.cpp
//! \brief Flat key=value scenario files
//---------------------------------------------------------------------------//
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "perpsim/error.hpp"
#include "perpsim/harness.hpp"

namespace perpsim
{
namespace
{
//---------------------------------------------------------------------------//
std::string_view trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;)
    {
        auto const pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
        {
            return out;
        }
        start = pos + 1;
    }
}

[[noreturn]] void fail(std::size_t line, std::string const& msg)
{
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double to_real(std::string_view text, std::size_t line, std::string_view key)
{
    double v = 0;
    auto const [ptr, ec]
        = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()
        || !std::isfinite(v))
    {
        fail(line,
             std::string(key) + ": expected a number, got '"
                 + std::string(text) + "'");
    }
    return v;
}

// Accepts "100000" as well as "1e5"
std::uint64_t
to_count(std::string_view text, std::size_t line, std::string_view key)
{
    std::uint64_t v = 0;
    auto const [ptr, ec]
        = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc{} && ptr == text.data() + text.size())
    {
        return v;
    }
    double const r = to_real(text, line, key);
    if (!(r >= 0) || r != std::floor(r) || r > 1.8e19)
    {
        fail(line,
             std::string(key) + ": expected a non-negative integer, got '"
                 + std::string(text) + "'");
    }
    return static_cast<std::uint64_t>(r);
}

bool to_bool(std::string_view text, std::size_t line, std::string_view key)
{
    if (text == "true" || text == "1")
    {
        return true;
    }
    if (text == "false" || text == "0")
    {
        return false;
    }
    fail(line, std::string(key) + ": expected true or false");
}

//---------------------------------------------------------------------------//
// Custom model pieces

Matrix parse_kernel(std::string_view text, std::size_t line)
{
    auto const rows = split(text, ';');
    std::size_t const n = rows.size();
    Matrix k(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
    {
        auto const cols = split(rows[i], ',');
        if (cols.size() != n)
        {
            fail(line, "kernel must be square");
        }
        for (std::size_t j = 0; j < n; ++j)
        {
            k(i, j) = to_real(cols[j], line, "kernel");
        }
    }
    return k;
}

IncrementFamily parse_increment(std::string_view text, std::size_t line)
{
    auto const parts = split(text, ':');
    if (parts[0] == "logchisq" && parts.size() == 2)
    {
        return LogChiSquareIncrement{to_real(parts[1], line, "increments")};
    }
    if (parts[0] == "normal" && parts.size() == 3)
    {
        return NormalIncrement{to_real(parts[1], line, "increments"),
                               to_real(parts[2], line, "increments")};
    }
    fail(line,
         "increments: expected logchisq:SCALE or normal:MEAN:SD, got '"
             + std::string(text) + "'");
}

RewardFamily parse_reward(std::string_view text, std::size_t line)
{
    auto const parts = split(text, ':');
    if (parts[0] == "const" && parts.size() == 2)
    {
        return ConstantReward{to_real(parts[1], line, "rewards")};
    }
    if (parts[0] == "lognormal" && parts.size() == 3)
    {
        return LognormalReward{to_real(parts[1], line, "rewards"),
                               to_real(parts[2], line, "rewards")};
    }
    fail(line,
         "rewards: expected const:VALUE or lognormal:MU:SD, got '"
             + std::string(text) + "'");
}

//---------------------------------------------------------------------------//
struct Entry
{
    std::string value;
    std::size_t line;
};

using Block = std::map<std::string, Entry>;

std::set<std::string> const& known_keys()
{
    static std::set<std::string> const keys{
        "name",    "model",          "alpha0",   "alpha1",    "mean",
        "stddev",  "reward",         "kernel",   "increments", "rewards",
        "initial_state", "estimator", "delta",   "deltas",    "reps",
        "budget_ms", "seed",         "a",        "n_star",    "step_cap",
        "raw_level", "enforce_budget", "demo"};
    return keys;
}

void check_delta(double d, std::size_t line)
{
    if (!(d > 0 && d < 1))
    {
        fail(line, "delta must be in (0,1)");
    }
}

Scenario build_scenario(Block const& b, std::size_t index, std::size_t line)
{
    Scenario sc;
    sc.line = line;
    sc.name = "scenario" + std::to_string(index);

    auto get = [&b](char const* key) -> Entry const* {
        auto it = b.find(key);
        return it == b.end() ? nullptr : &it->second;
    };
    auto real = [&](char const* key, auto&& assign) {
        if (auto const* e = get(key))
        {
            assign(to_real(e->value, e->line, key), e->line);
        }
    };
    auto count = [&](char const* key, auto&& assign) {
        if (auto const* e = get(key))
        {
            assign(to_count(e->value, e->line, key), e->line);
        }
    };
    auto flag = [&](char const* key, bool& out) {
        if (auto const* e = get(key))
        {
            out = to_bool(e->value, e->line, key);
        }
    };

    if (auto const* e = get("name"))
    {
        if (e->value.empty()
            || e->value.find_first_of(",\" \t") != std::string::npos)
        {
            fail(e->line, "name must be non-empty without commas or spaces");
        }
        sc.name = e->value;
    }
    if (auto const* e = get("model"))
    {
        if (e->value != "arch1" && e->value != "two_state"
            && e->value != "normal" && e->value != "custom")
        {
            fail(e->line,
                 "model must be one of arch1, two_state, normal, custom");
        }
        sc.model = e->value;
    }
    if (auto const* e = get("estimator"))
    {
        if (e->value == "crude")
            sc.estimator = EstimatorKind::crude;
        else if (e->value == "naive")
            sc.estimator = EstimatorKind::naive;
        else if (e->value == "si")
            sc.estimator = EstimatorKind::si;
        else if (e->value == "sd")
            sc.estimator = EstimatorKind::sd;
        else
            fail(e->line, "estimator must be one of crude, naive, si, sd");
    }

    real("alpha0", [&](double v, std::size_t) { sc.alpha0 = v; });
    real("alpha1", [&](double v, std::size_t) { sc.alpha1 = v; });
    real("mean", [&](double v, std::size_t) { sc.mean = v; });
    real("stddev", [&](double v, std::size_t) { sc.stddev = v; });
    real("reward", [&](double v, std::size_t) { sc.reward = v; });
    real("delta", [&](double v, std::size_t l) {
        check_delta(v, l);
        sc.delta = v;
    });
    if (auto const* e = get("deltas"))
    {
        for (auto part : split(e->value, ','))
        {
            double const d = to_real(part, e->line, "deltas");
            check_delta(d, e->line);
            sc.deltas.push_back(d);
        }
    }
    count("reps", [&](std::uint64_t v, std::size_t l) {
        if (v < 1)
        {
            fail(l, "reps must be at least 1");
        }
        sc.reps = v;
    });
    real("budget_ms", [&](double v, std::size_t l) {
        if (!(v > 0))
        {
            fail(l, "budget_ms must be positive");
        }
        sc.budget_ms = v;
    });
    count("seed", [&](std::uint64_t v, std::size_t) { sc.seed = v; });
    real("a", [&](double v, std::size_t l) {
        if (!(v > 0 && v < 1))
        {
            fail(l, "a must be in (0,1)");
        }
        sc.a = v;
    });
    count("n_star", [&](std::uint64_t v, std::size_t l) {
        if (v < 1)
        {
            fail(l, "n_star must be at least 1");
        }
        sc.n_star = v;
    });
    count("step_cap", [&](std::uint64_t v, std::size_t l) {
        if (v < 1)
        {
            fail(l, "step_cap must be at least 1");
        }
        sc.step_cap = v;
    });
    flag("raw_level", sc.raw_level);
    flag("enforce_budget", sc.enforce_budget);
    flag("demo", sc.demo);

    // Custom model
    bool const any_custom = get("kernel") || get("increments")
                            || get("rewards") || get("initial_state");
    if (sc.model == "custom")
    {
        auto const* k = get("kernel");
        auto const* inc = get("increments");
        auto const* rew = get("rewards");
        if (!k || !inc || !rew)
        {
            fail(line, "model=custom needs kernel, increments and rewards");
        }
        ModelDefinition def;
        def.name = sc.name;
        def.kernel = parse_kernel(k->value, k->line);
        for (auto part : split(inc->value, ';'))
        {
            def.increments.push_back(parse_increment(part, inc->line));
        }
        for (auto part : split(rew->value, ';'))
        {
            def.rewards.push_back(parse_reward(part, rew->line));
        }
        if (auto const* e = get("initial_state"))
        {
            def.initial_state = to_count(e->value, e->line, "initial_state");
        }
        sc.custom = std::move(def);
    }
    else if (any_custom)
    {
        fail(line, "kernel/increments/rewards/initial_state need model=custom");
    }

    // Cross-key checks
    if (sc.reps.has_value() == sc.budget_ms.has_value())
    {
        fail(line, "exactly one of reps/budget_ms must be set");
    }
    if (!sc.delta && sc.deltas.empty())
    {
        fail(line, "delta is required");
    }
    if (sc.estimator == EstimatorKind::naive && !sc.demo)
    {
        fail(line,
             "the naive estimator can have infinite variance; set demo=true "
             "to run it");
    }
    if (sc.n_star && sc.step_cap && *sc.step_cap < *sc.n_star)
    {
        fail(line, "step_cap must be at least n_star");
    }
    try
    {
        Model const m = build_model(sc);
        std::vector<double> all = sc.deltas;
        if (sc.delta)
        {
            all.push_back(*sc.delta);
        }
        for (double d : all)
        {
            double const sd = sampler_delta(sc, d);
            if (!(sd > 0 && sd < 1))
            {
                fail(line, "delta/alpha1 must be in (0,1)");
            }
        }
    }
    catch (InvalidArgument const& e)
    {
        fail(line, e.what());
    }
    return sc;
}

std::string format_entry(double v)
{
    return format_double(v);
}
}  // namespace

//---------------------------------------------------------------------------//
std::vector<Scenario> parse_config(std::string_view text)
{
    std::vector<Scenario> out;
    Block block;
    std::size_t block_line = 1;
    std::size_t line_no = 0;

    auto flush = [&] {
        if (!block.empty())
        {
            out.push_back(build_scenario(block, out.size() + 1, block_line));
            block.clear();
        }
    };

    std::size_t pos = 0;
    while (pos <= text.size())
    {
        auto const nl = text.find('\n', pos);
        std::string_view raw = text.substr(
            pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (auto const hash = raw.find('#'); hash != raw.npos)
        {
            raw = raw.substr(0, hash);
        }
        auto const line = trim(raw);
        if (line.empty())
        {
            continue;
        }
        if (line == "---")
        {
            flush();
            continue;
        }
        auto const eq = line.find('=');
        if (eq == line.npos)
        {
            fail(line_no, "expected key=value");
        }
        std::string const key{trim(line.substr(0, eq))};
        std::string const value{trim(line.substr(eq + 1))};
        if (!known_keys().count(key))
        {
            fail(line_no, "unknown key '" + key + "'");
        }
        if (block.count(key))
        {
            fail(line_no, "duplicate key '" + key + "'");
        }
        if (block.empty())
        {
            block_line = line_no;
        }
        block.emplace(key, Entry{value, line_no});
    }
    flush();
    if (out.empty())
    {
        throw ConfigError("configuration contains no scenarios");
    }
    return out;
}

std::vector<Scenario> load_config(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_config_text(std::vector<Scenario> const& scenarios)
{
    std::ostringstream os;
    bool first = true;
    for (auto const& sc : scenarios)
    {
        if (!first)
        {
            os << "---\n";
        }
        first = false;
        os << "name=" << sc.name << "\nmodel=" << sc.model << '\n';
        if (sc.model == "arch1")
        {
            os << "alpha0=" << format_entry(sc.alpha0)
               << "\nalpha1=" << format_entry(sc.alpha1) << '\n';
        }
        else if (sc.model == "normal")
        {
            os << "mean=" << format_entry(sc.mean)
               << "\nstddev=" << format_entry(sc.stddev)
               << "\nreward=" << format_entry(sc.reward) << '\n';
        }
        else if (sc.model == "custom")
        {
            throw InvalidArgument("custom models cannot be serialized");
        }
        os << "estimator=" << to_string(sc.estimator) << '\n';
        if (sc.delta)
        {
            os << "delta=" << format_entry(*sc.delta) << '\n';
        }
        if (!sc.deltas.empty())
        {
            os << "deltas=";
            for (std::size_t i = 0; i < sc.deltas.size(); ++i)
            {
                os << (i ? "," : "") << format_entry(sc.deltas[i]);
            }
            os << '\n';
        }
        if (sc.reps)
        {
            os << "reps=" << *sc.reps << '\n';
        }
        if (sc.budget_ms)
        {
            os << "budget_ms=" << format_entry(*sc.budget_ms) << '\n';
        }
        os << "seed=" << sc.seed << '\n';
        if (sc.a)
        {
            os << "a=" << format_entry(*sc.a) << '\n';
        }
        if (sc.n_star)
        {
            os << "n_star=" << *sc.n_star << '\n';
        }
        if (sc.step_cap)
        {
            os << "step_cap=" << *sc.step_cap << '\n';
        }
        if (sc.raw_level)
        {
            os << "raw_level=true\n";
        }
        if (!sc.enforce_budget)
        {
            os << "enforce_budget=false\n";
        }
        if (sc.demo)
        {
            os << "demo=true\n";
        }
    }
    return os.str();
}

}  // namespace perpsim
