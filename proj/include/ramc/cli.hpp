#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ramc/casbridge.hpp"
#include "ramc/cyclounits.hpp"
#include "ramc/quadratic.hpp"
#include "ramc/ramc.hpp"

namespace ramc::cli {

enum ExitCode : int { AllEqual = 0, SomeUnequal = 1, Failure = 2 };

class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct Range {
    long lo = 0, hi = -1;

    [[nodiscard]] bool contains(long x) const { return lo <= x && x <= hi; }

    static Range parse(const std::string& s) {
        auto colon = s.find(':');
        if (colon == std::string::npos) throw UsageError("range '" + s + "' must be A:B");
        Range r;
        try {
            r.lo = std::stol(s.substr(0, colon));
            r.hi = std::stol(s.substr(colon + 1));
        } catch (const std::exception&) {
            throw UsageError("range '" + s + "' must be A:B with integers");
        }
        if (r.lo > r.hi) throw UsageError("range '" + s + "' is empty");
        return r;
    }
};

enum class Format { Table, Records };

struct RunConfig {
    long p = 3;
    Range f_range{229, 1000};
    Range q_range{7, 10000};
    std::optional<long> ell;
    std::optional<long> n;
    int digits = 150;
    casbridge::FetchMode mode = casbridge::FetchMode::FixtureOnly;
    Format format = Format::Table;
    std::string gp_path;
    unsigned jobs = 1;
    std::filesystem::path fixture_dir;
    long class_threshold = 3;  ///< minimal p-valuation of #H_K in a survey

    [[nodiscard]] casbridge::CasConfig cas() const {
        casbridge::CasConfig c;
        c.fixture_dir = fixture_dir;
        c.gp_path = gp_path;
        return c;
    }
    [[nodiscard]] std::filesystem::path resolved_fixture_dir() const {
        return fixture_dir.empty() ? casbridge::default_fixture_dir() : fixture_dir;
    }
};

inline bool admissible_f(long f) { return f > 2 && characters::is_prime(f) && f % 4 == 1; }
inline bool admissible_q(long q) { return q > 2 && characters::is_prime(q) && q % 3 == 1; }

inline void check_case(const RunConfig& cfg, long f, long q) {
    if (cfg.p != 3) throw UsageError("only p=3 is supported");
    if (!admissible_f(f)) throw UsageError("f=" + std::to_string(f) + " is not a prime congruent to 1 mod 4");
    if (!admissible_q(q)) throw UsageError("q=" + std::to_string(q) + " is not a prime congruent to 1 mod 3");
    if (f == q) throw UsageError("f and q must be distinct");
}

inline long valuation(mpz_class n, long p) {
    long v = 0;
    while (n != 0 && n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline std::string table_header() {
    std::ostringstream o;
    o << std::left << std::setw(6) << "f" << std::setw(7) << "q" << std::setw(16) << "H_K" << std::setw(6) << "H_k" << std::setw(7)
      << "index" << std::setw(7) << "order" << "verdict";
    return o.str();
}

inline std::string table_row(const CaseReport& r) {
    std::ostringstream o;
    o << std::left << std::setw(6) << r.f << std::setw(7) << r.q << std::setw(16) << r.class_group_K.to_string() << std::setw(6)
      << r.class_group_k.to_string() << std::setw(7) << r.index << std::setw(7) << r.order << to_string(r.verdict);
    return o.str();
}

// --- commands ---------------------------------------------------------------

inline int cmd_verify(long f, long q, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    check_case(cfg, f, q);
    CaseReport rep;
    try {
        rep = verify_ramc_case(f, q, cfg.mode, cfg.cas(), cfg.digits);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Failure;
    }
    if (cfg.format == Format::Records)
        out << rep.record() << "\n";
    else
        out << render_report(rep);
    return rep.verdict == Verdict::Equal ? AllEqual : SomeUnequal;
}

struct SurveyTally {
    long cases = 0, equal = 0, unequal = 0, failed = 0, below_threshold = 0, no_data = 0;
};

inline int cmd_survey(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.p != 3) throw UsageError("only p=3 is supported");
    const auto dir = cfg.resolved_fixture_dir();
    SurveyTally t;
    std::vector<std::pair<long, long>> pending;
    for (long f = std::max(cfg.f_range.lo, 3L); f <= cfg.f_range.hi; ++f) {
        if (!admissible_f(f) || quadratic::class_group(f).order() % cfg.p != 0) continue;
        for (long q = std::max(cfg.q_range.lo, 3L); q <= cfg.q_range.hi; ++q) {
            if (!admissible_q(q) || q == f) continue;
            if (cfg.mode == casbridge::FetchMode::FixtureOnly &&
                !std::filesystem::exists(dir / (std::to_string(f) + "_" + std::to_string(q) + ".fixture"))) {
                ++t.no_data;
                continue;
            }
            pending.emplace_back(f, q);
        }
    }
    auto fetched = casbridge::fetch_many(pending, cfg.digits, cfg.mode, cfg.cas(), cfg.jobs);

    if (cfg.format == Format::Table) out << table_header() << "\n";
    for (std::size_t i = 0; i < pending.size(); ++i) {
        auto [f, q] = pending[i];
        if (!fetched[i].fixture) {
            ++t.failed;
            out << "case: " << f << " " << q << " ERROR " << fetched[i].error << "\n";
            continue;
        }
        const auto& fx = *fetched[i].fixture;
        if (valuation(fx.class_group_K.order(), cfg.p) < cfg.class_threshold) {
            ++t.below_threshold;
            continue;
        }
        try {
            auto rep = build_case_report(fx, cfg.digits);
            ++t.cases;
            (rep.verdict == Verdict::Equal ? t.equal : t.unequal)++;
            out << (cfg.format == Format::Records ? rep.record() : table_row(rep)) << "\n";
        } catch (const std::exception& e) {
            ++t.failed;
            out << "case: " << f << " " << q << " ERROR " << e.what() << "\n";
        }
    }
    out << "survey: cases=" << t.cases << " equal=" << t.equal << " unequal=" << t.unequal << " failed=" << t.failed
        << " below_threshold=" << t.below_threshold << " no_data=" << t.no_data << "\n";
    if (t.failed) err << t.failed << " case(s) failed\n";
    if (t.failed) return Failure;
    return t.unequal ? SomeUnequal : AllEqual;
}

struct CapitulationInput {
    std::optional<std::vector<long>> hK, hL;
    std::optional<std::string> hL_order, hK1_order;
    long r = 1;
};

inline int cmd_capitulation(long f, long q, long ell, const RunConfig& cfg, const CapitulationInput& in, std::ostream& out,
                            std::ostream& err) {
    check_case(cfg, f, q);
    std::optional<CapitulationScenario> known;
    for (const auto& s : known_capitulation_scenarios())
        if (s.f == f && s.q == q && s.ell == ell && (!cfg.n || *cfg.n == s.n)) known = s;
    const long n = cfg.n ? *cfg.n : known ? known->n : 1;
    if (n < 1) throw UsageError("n must be at least 1");
    const long pn = characters::ipow(cfg.p, static_cast<int>(n));
    if (!characters::is_prime(ell) || (ell - 1) % (2 * pn) != 0)
        throw UsageError("ell=" + std::to_string(ell) + " is not a prime congruent to 1 mod 2p^n = " + std::to_string(2 * pn));
    if (long deg = cyclounits::residue_degree(f, q, ell); deg != 6) throw UsageError(cyclounits::NotInert(ell, deg, 6).what());

    CapitulationScenario s = known.value_or(CapitulationScenario{});
    s.f = f;
    s.q = q;
    s.ell = ell;
    s.n = n;
    s.r = in.r;
    try {
        if (in.hK) {
            s.hK = p_part(AbelianGroupStructure(*in.hK), cfg.p);
        } else if (!known) {
            s.hK = p_part(casbridge::fetch_field_data(f, q, cfg.digits, cfg.mode, cfg.cas()).class_group_K, cfg.p);
        }
        // user data on L replaces the built-in data
        if (in.hL || in.hL_order) {
            s.hL.reset();
            s.hL_order.reset();
        }
        if (in.hL) s.hL = p_part(AbelianGroupStructure(*in.hL), cfg.p);
        if (in.hL_order) s.hL_order = mpz_class(*in.hL_order);
        if (in.hK1_order) s.hK1_order = mpz_class(*in.hK1_order);
        if (!s.hL && !s.hL_order && !s.hK1_order) {
            err << "error: no data on the p-class group of L for (" << f << ", " << q << ", " << ell << ", n=" << n
                << "); pass --hL, --hL-order or --hK1-order\n";
            return Failure;
        }
        auto d = diagnose_capitulation(s);
        out << render_diagnosis(s, d);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Failure;
    }
    return AllEqual;
}

inline int cmd_fixture_import(const std::filesystem::path& raw, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::ifstream in(raw, std::ios::binary);
    if (!in) {
        err << "error: cannot read " << raw << "\n";
        return Failure;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        auto fx = casbridge::parse_cas_output(ss.str(), cfg.digits);
        casbridge::write_fixture_file(cfg.resolved_fixture_dir(), fx);
        out << "wrote " << (cfg.resolved_fixture_dir() / fx.file_name()).string() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Failure;
    }
    return AllEqual;
}

inline int cmd_fixture_show(long f, long q, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        out << casbridge::serialize(casbridge::fetch_field_data(f, q, cfg.digits, casbridge::FetchMode::FixtureOnly, cfg.cas()));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Failure;
    }
    return AllEqual;
}

/// Parses every fixture in the directory, checks its provenance and runs the
/// dual-route comparisons of the case report.
inline int cmd_fixture_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto dir = cfg.resolved_fixture_dir();
    if (!std::filesystem::is_directory(dir)) {
        err << "error: no fixture directory " << dir << "\n";
        return Failure;
    }
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".fixture") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    long bad = 0;
    for (const auto& path : files) {
        try {
            auto fx = casbridge::load_fixture_file(path);
            casbridge::validate_provenance(fx, fx.f, fx.q);
            if (path.filename() != fx.file_name()) throw casbridge::HashMismatch("file name does not match its (f, q)");
            auto rep = build_case_report(fx, std::min(cfg.digits, fx.digits));
            if (!rep.k_side_consistent || !rep.cas_relations_agree || !rep.epsilon0_agrees)
                throw DataInconsistency(rep.warnings.empty() ? "dual-route check failed" : rep.warnings.front());
            out << "ok " << path.filename().string() << "\n";
        } catch (const std::exception& e) {
            ++bad;
            out << "FAIL " << path.filename().string() << ": " << e.what() << "\n";
        }
    }
    out << "fixtures: " << files.size() << " checked, " << bad << " failed\n";
    return bad ? Failure : AllEqual;
}

// --- argument parsing ---------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Arithmetic vs analytic components of 3-class groups of real sextic fields"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "ramc 1.0");

    RunConfig cfg;
    std::string mode = "fixture-only", format = "table", f_range, q_range;
    std::optional<long> opt_f, opt_q, opt_ell, opt_n;
    app.add_option("--p", cfg.p, "prime p (only 3)")->capture_default_str();
    app.add_option("--digits", cfg.digits, "working precision in decimal digits")->check(CLI::Range(50, 100000))->capture_default_str();
    app.add_option("--mode", mode, "fixture-only or subprocess")->check(CLI::IsMember({"fixture-only", "subprocess"}))->capture_default_str();
    app.add_option("--format", format, "table or records")->check(CLI::IsMember({"table", "records"}))->capture_default_str();
    app.add_option("--gp-path", cfg.gp_path, "CAS executable (overrides RAMC_GP_PATH)");
    app.add_option("--jobs", cfg.jobs, "CAS subprocesses in flight")->check(CLI::Range(1u, 256u))->capture_default_str();
    app.add_option("--fixture-dir", cfg.fixture_dir, "fixture directory (default RAMC_FIXTURE_DIR or the shipped fixtures)");
    app.add_option("--f", opt_f, "quadratic conductor f");
    app.add_option("--q", opt_q, "cubic conductor q");
    app.add_option("--ell", opt_ell, "prime ell for capitulation");
    app.add_option("--n", opt_n, "[L:K] = p^n for capitulation");
    app.add_option("--f-range", f_range, "survey range A:B for f");
    app.add_option("--q-range", q_range, "survey range A:B for q");

    long pf = 0, pq = 0, pell = 0;
    auto* verify = app.add_subcommand("verify", "verify one (f, q) case");
    verify->add_option("f", pf, "f");
    verify->add_option("q", pq, "q");

    auto* survey = app.add_subcommand("survey", "verify all admissible cases in a range");
    survey->add_option("--threshold", cfg.class_threshold, "minimal p-valuation of #H_K")->capture_default_str();

    CapitulationInput cap;
    std::vector<long> hK, hL;
    std::string hL_order, hK1_order;
    auto* capit = app.add_subcommand("capitulation", "diagnose capitulation in L = K M0");
    capit->add_option("f", pf, "f");
    capit->add_option("q", pq, "q");
    capit->add_option("ell", pell, "ell");
    capit->add_option("--hK", hK, "p-class group of K as invariants")->delimiter(',');
    capit->add_option("--hL", hL, "p-class group of L as invariants")->delimiter(',');
    capit->add_option("--hL-order", hL_order, "order of the p-class group of L");
    capit->add_option("--hK1-order", hK1_order, "p-class number of the first layer K1");
    capit->add_option("--r", cap.r, "number of ramified primes")->capture_default_str();

    auto* fixture = app.add_subcommand("fixture", "manage CAS fixtures");
    fixture->require_subcommand(1);
    fixture->fallthrough();
    std::string raw_path;
    auto* fimport = fixture->add_subcommand("import", "convert raw CAS output into a fixture");
    fimport->add_option("file", raw_path, "raw output of the CAS script")->required()->check(CLI::ExistingFile);
    auto* fshow = fixture->add_subcommand("show", "print a stored fixture");
    fshow->add_option("f", pf, "f")->required();
    fshow->add_option("q", pq, "q")->required();
    auto* fcheck = fixture->add_subcommand("check", "validate every fixture in the directory");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return AllEqual;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return AllEqual;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << "\n";
        return AllEqual;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
        return Failure;
    }

    cfg.mode = mode == "subprocess" ? casbridge::FetchMode::Subprocess : casbridge::FetchMode::FixtureOnly;
    cfg.format = format == "records" ? Format::Records : Format::Table;
    cfg.ell = opt_ell;
    cfg.n = opt_n;
    try {
        if (!f_range.empty()) cfg.f_range = Range::parse(f_range);
        if (!q_range.empty()) cfg.q_range = Range::parse(q_range);
        if (opt_f) cfg.f_range = Range{*opt_f, *opt_f};
        if (opt_q) cfg.q_range = Range{*opt_q, *opt_q};
        auto need = [](long positional, const std::optional<long>& flag, const char* name) {
            if (positional) return positional;
            if (flag) return *flag;
            throw UsageError(std::string("missing ") + name);
        };
        if (*verify) return cmd_verify(need(pf, opt_f, "f"), need(pq, opt_q, "q"), cfg, out, err);
        if (*survey) return cmd_survey(cfg, out, err);
        if (*capit) {
            if (!hK.empty()) cap.hK = hK;
            if (!hL.empty()) cap.hL = hL;
            if (!hL_order.empty()) cap.hL_order = hL_order;
            if (!hK1_order.empty()) cap.hK1_order = hK1_order;
            return cmd_capitulation(need(pf, opt_f, "f"), need(pq, opt_q, "q"), need(pell, opt_ell, "ell"), cfg, cap, out, err);
        }
        if (*fimport) return cmd_fixture_import(raw_path, cfg, out, err);
        if (*fshow) return cmd_fixture_show(pf, pq, cfg, out, err);
        if (*fcheck) return cmd_fixture_check(cfg, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return Failure;
    }
    return Failure;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(std::move(args), out, err);
}

}  // namespace ramc::cli
