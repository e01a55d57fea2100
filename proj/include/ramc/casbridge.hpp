#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <unistd.h>

#include <openssl/evp.h>

#include "ramc/abelian_group.hpp"
#include "ramc/cas_script.hpp"
#include "ramc/lattice.hpp"
#include "ramc/real.hpp"
#include "ramc/subprocess.hpp"

namespace ramc::casbridge {

class CasError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class MissingField : public CasError {
  public:
    explicit MissingField(std::string field_name)
        : CasError("missing field in CAS output: " + field_name), name(std::move(field_name)) {}
    std::string name;
};

class MalformedNumber : public CasError {
  public:
    using CasError::CasError;
};

class CasUnavailable : public CasError {
  public:
    using CasError::CasError;
};

class FixtureMissing : public CasError {
  public:
    using CasError::CasError;
};

class HashMismatch : public CasError {
  public:
    using CasError::CasError;
};

/// Output that parsed but whose numbers do not hold together at the
/// working precision; a rerun at higher precision is warranted.
class UnstableOutput : public CasError {
  public:
    using CasError::CasError;
};

inline std::string sha256_hex(std::string_view text) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

inline std::string script_hash(long f, long q, int digits) { return sha256_hex(build_case_script(f, q, digits)); }

/// Everything the verification needs about one sextic field K = k·K0 with
/// k = Q(sqrt f) and K0 the cubic subfield of conductor q. Decimal values
/// are kept as the CAS printed them.
struct FieldDataFixture {
    long f = 0, q = 0, p = 3;
    int digits = 150;
    std::string tool_version;
    std::string script_sha256;
    std::vector<long> defining_polynomial;  ///< PK, leading coefficient first
    AbelianGroupStructure class_group_K, class_group_k, class_group_K0;
    int kronecker_fq = 0;
    std::string log_epsilon0;
    std::vector<std::string> unit_logs;        ///< nonzero relative-unit logs
    std::vector<std::string> cyclotomic_logs;  ///< the three eta logs
    std::vector<std::vector<long>> relation_rows;  ///< as printed; empty when the CAS skipped the search
    std::vector<long> epsilon0_expression;         ///< over the reduced unit basis

    friend bool operator==(const FieldDataFixture&, const FieldDataFixture&) = default;

    [[nodiscard]] std::string file_name() const { return std::to_string(f) + "_" + std::to_string(q) + ".fixture"; }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline long parse_long(const std::string& s) {
    std::string t = trim(s);
    if (t.empty()) throw MalformedNumber("empty integer");
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(t, &pos);
    } catch (const std::exception&) {
        throw MalformedNumber("malformed integer: '" + t + "'");
    }
    if (pos != t.size()) throw MalformedNumber("malformed integer: '" + t + "'");
    return v;
}

/// Separator-split integer list; brackets and a trailing ~ are ignored.
inline std::vector<long> parse_long_list(std::string s, char sep) {
    std::string t = trim(s);
    if (!t.empty() && t.back() == '~') t.pop_back();
    if (!t.empty() && t.front() == '[') t.erase(0, 1);
    if (!t.empty() && t.back() == ']') t.pop_back();
    std::vector<long> out;
    if (trim(t).empty()) return out;
    std::stringstream ss(t);
    std::string item;
    if (sep == ' ') {
        while (ss >> item) out.push_back(parse_long(item));
    } else {
        while (std::getline(ss, item, sep)) out.push_back(parse_long(item));
    }
    return out;
}

/// Checks that a decimal string is a number MPFR reads exactly to the end.
inline std::string checked_decimal(const std::string& s) {
    std::string t = trim(s);
    if (t.empty()) throw MalformedNumber("empty decimal");
    for (char c : t)
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' || c == 'E' || c == 'e'))
            throw MalformedNumber("malformed decimal: '" + t + "'");
    try {
        (void)Real::parse(t, Precision{50});
    } catch (const std::invalid_argument&) {
        throw MalformedNumber("malformed decimal: '" + t + "'");
    }
    return t;
}

inline std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

inline std::string join(const std::vector<long>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + std::to_string(v[i]);
    return out;
}

inline std::vector<lattice::UnitLogVector> as_logs(const std::vector<std::string>& values, const std::string& stem, Precision prec) {
    std::vector<lattice::UnitLogVector> out;
    for (std::size_t i = 0; i < values.size(); ++i)
        out.emplace_back(stem + std::to_string(i + 1), Real::parse(values[i], prec));
    return out;
}

}  // namespace detail

/// Greedy basis of the unit logs, epsilon0 over it, and the eta relations,
/// all found natively from the stored decimal strings.
struct NativeRelations {
    lattice::BasisReduction reduction;
    std::vector<long> epsilon0;
    lattice::RelationResult eta;
};

inline NativeRelations native_relations(const FieldDataFixture& fx, const lattice::SearchOptions& opt = {}) {
    const Precision prec{fx.digits};
    auto logs = detail::as_logs(fx.unit_logs, "unit_log_", prec);
    NativeRelations out;
    out.reduction = lattice::reduce_to_basis(logs, opt);
    std::vector<lattice::UnitLogVector> basis;
    for (auto i : out.reduction.basis) basis.push_back(logs[i]);
    auto eps = lattice::find_integer_relations({lattice::UnitLogVector("log_epsilon0", Real::parse(fx.log_epsilon0, prec))}, basis, opt);
    for (std::size_t j = 0; j < basis.size(); ++j) out.epsilon0.push_back(eps.rows(0, j).get_si());
    out.eta = lattice::find_integer_relations(detail::as_logs(fx.cyclotomic_logs, "LEtaK_", prec), basis, opt);
    return out;
}

/// Builds a fixture from a completed run of build_case_script(f, q, digits).
inline FieldDataFixture parse_cas_output(std::string_view text, int digits = 150) {
    std::map<std::string, std::string> kv;
    std::map<long, std::string> unit_logs, cyclo_logs;
    std::map<long, std::string> relations;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
        auto indexed = [&](const std::string& stem, std::map<long, std::string>& into) {
            if (key.rfind(stem, 0) != 0) return false;
            into[detail::parse_long(key.substr(stem.size()))] = value;
            return true;
        };
        if (indexed("unit_log_", unit_logs) || indexed("cyclotomic_log_", cyclo_logs) || indexed("relation_", relations)) continue;
        kv[key] = value;
    }
    auto need = [&](const std::string& key, const std::string& symbol) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw MissingField(symbol);
        return it->second;
    };
    auto group = [&](const std::string& key, const std::string& symbol) {
        return AbelianGroupStructure(detail::parse_long_list(need(key, symbol), ','));
    };

    FieldDataFixture fx;
    fx.digits = digits;
    auto ends = detail::parse_long_list(need("end", "end"), ' ');
    if (ends.size() != 2) throw MalformedNumber("end line must carry f and q");
    fx.f = ends[0];
    fx.q = ends[1];
    {
        auto v = detail::parse_long_list(need("tool_version", "version"), ',');
        fx.tool_version = detail::join(v, ".");
    }
    fx.script_sha256 = script_hash(fx.f, fx.q, digits);
    fx.class_group_k = group("classgroup_k", "Ck");
    fx.log_epsilon0 = detail::checked_decimal(need("log_epsilon0", "LEke"));
    fx.class_group_K0 = group("classgroup_K0", "CK0");
    fx.defining_polynomial = detail::parse_long_list(need("PK", "PK"), ',');
    fx.class_group_K = group("classgroup_K", "CK");
    fx.kronecker_fq = static_cast<int>(detail::parse_long(need("kronecker", "kronecker")));
    if (fx.kronecker_fq != 1 && fx.kronecker_fq != -1) throw MalformedNumber("kronecker symbol must be +1 or -1");
    if (fx.defining_polynomial.size() != 7) throw MalformedNumber("PK must have degree 6");

    if (unit_logs.empty()) throw MissingField("LEK");
    for (auto& [i, v] : unit_logs) fx.unit_logs.push_back(detail::checked_decimal(v));
    if (fx.unit_logs.size() < 3) throw UnstableOutput("fewer than three nonzero unit logs");
    if (cyclo_logs.size() != 3) throw MissingField("LEtaK");
    for (auto& [i, v] : cyclo_logs) fx.cyclotomic_logs.push_back(detail::checked_decimal(v));
    for (auto& [j, v] : relations) {
        auto row = detail::parse_long_list(v, ' ');
        if (row.size() != fx.unit_logs.size()) throw MalformedNumber("relation row length differs from the number of logs");
        fx.relation_rows.push_back(row);
    }

    auto lindep = kv.find("epsilon0_lindep");
    if (lindep != kv.end()) {
        // c0 LEke + c1 L1 + c2 L2 + c3 L3 = 0
        auto c = detail::parse_long_list(lindep->second, ',');
        if (c.size() != 4 || (c[0] != 1 && c[0] != -1)) throw UnstableOutput("epsilon0 is not a unit combination: " + lindep->second);
        for (std::size_t i = 1; i < 4; ++i) fx.epsilon0_expression.push_back(-c[i] * c[0]);
    } else {
        try {
            fx.epsilon0_expression = native_relations(fx).epsilon0;
        } catch (const std::exception& e) {
            throw UnstableOutput(std::string("epsilon0 expression not found natively: ") + e.what());
        }
    }
    return fx;
}

// ---------------------------------------------------------------------------
// Fixture file format: `key: value` lines, comma-separated lists, relation
// rows separated by ';'.

inline std::string serialize(const FieldDataFixture& fx) {
    auto groups = [](const AbelianGroupStructure& g) { return detail::join(g.factors(), ", "); };
    std::vector<std::string> rows;
    for (const auto& r : fx.relation_rows) rows.push_back(detail::join(r, " "));
    std::ostringstream o;
    auto put = [&](const char* key, const std::string& value) {
        o << key << ":";
        if (!value.empty()) o << " " << value;
        o << "\n";
    };
    put("format", "ramc-fixture 1");
    put("f", std::to_string(fx.f));
    put("q", std::to_string(fx.q));
    put("p", std::to_string(fx.p));
    put("digits", std::to_string(fx.digits));
    put("tool_version", fx.tool_version);
    put("script_sha256", fx.script_sha256);
    put("defining_polynomial", detail::join(fx.defining_polynomial, ", "));
    put("class_group_K", groups(fx.class_group_K));
    put("class_group_k", groups(fx.class_group_k));
    put("class_group_K0", groups(fx.class_group_K0));
    put("kronecker_fq", std::to_string(fx.kronecker_fq));
    put("log_epsilon0", fx.log_epsilon0);
    put("unit_logs", detail::join(fx.unit_logs, ", "));
    put("cyclotomic_logs", detail::join(fx.cyclotomic_logs, ", "));
    put("relation_rows", detail::join(rows, "; "));
    put("epsilon0_expression", detail::join(fx.epsilon0_expression, ", "));
    return o.str();
}

inline FieldDataFixture parse_fixture(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw MalformedNumber("fixture line without key: '" + line + "'");
        kv[detail::trim(line.substr(0, colon))] = detail::trim(line.substr(colon + 1));
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw MissingField(key);
        return it->second;
    };
    auto decimals = [&](const std::string& key) {
        std::vector<std::string> out;
        std::stringstream ss(need(key));
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(detail::checked_decimal(item));
        if (out.empty()) throw MissingField(key);
        return out;
    };
    if (need("format") != "ramc-fixture 1") throw MalformedNumber("unknown fixture format '" + need("format") + "'");
    FieldDataFixture fx;
    fx.f = detail::parse_long(need("f"));
    fx.q = detail::parse_long(need("q"));
    fx.p = detail::parse_long(need("p"));
    fx.digits = static_cast<int>(detail::parse_long(need("digits")));
    fx.tool_version = need("tool_version");
    fx.script_sha256 = need("script_sha256");
    if (fx.script_sha256.size() != 64) throw MalformedNumber("script_sha256 must be 64 hex digits");
    fx.defining_polynomial = detail::parse_long_list(need("defining_polynomial"), ',');
    fx.class_group_K = AbelianGroupStructure(detail::parse_long_list(need("class_group_K"), ','));
    fx.class_group_k = AbelianGroupStructure(detail::parse_long_list(need("class_group_k"), ','));
    fx.class_group_K0 = AbelianGroupStructure(detail::parse_long_list(need("class_group_K0"), ','));
    fx.kronecker_fq = static_cast<int>(detail::parse_long(need("kronecker_fq")));
    if (fx.kronecker_fq != 1 && fx.kronecker_fq != -1) throw MalformedNumber("kronecker_fq must be +1 or -1");
    fx.log_epsilon0 = detail::checked_decimal(need("log_epsilon0"));
    fx.unit_logs = decimals("unit_logs");
    fx.cyclotomic_logs = decimals("cyclotomic_logs");
    {
        std::stringstream ss(need("relation_rows"));
        std::string row;
        while (std::getline(ss, row, ';'))
            if (!detail::trim(row).empty()) fx.relation_rows.push_back(detail::parse_long_list(row, ' '));
    }
    fx.epsilon0_expression = detail::parse_long_list(need("epsilon0_expression"), ',');
    if (fx.epsilon0_expression.empty()) throw MissingField("epsilon0_expression");
    return fx;
}

// ---------------------------------------------------------------------------

enum class FetchMode { Subprocess, FixtureOnly };

struct CasConfig {
    std::filesystem::path fixture_dir;
    std::string gp_path;  ///< empty: use RAMC_GP_PATH, then "gp"
    std::chrono::seconds timeout{600};
    int escalated_digits = 300;

    [[nodiscard]] std::string resolved_gp_path() const {
        if (!gp_path.empty()) return gp_path;
        if (const char* env = std::getenv("RAMC_GP_PATH"); env && *env) return env;
        return "gp";
    }
};

#ifdef RAMC_DEFAULT_FIXTURE_DIR
inline std::filesystem::path default_fixture_dir() {
    if (const char* env = std::getenv("RAMC_FIXTURE_DIR"); env && *env) return env;
    return RAMC_DEFAULT_FIXTURE_DIR;
}
#else
inline std::filesystem::path default_fixture_dir() {
    if (const char* env = std::getenv("RAMC_FIXTURE_DIR"); env && *env) return env;
    return "fixtures";
}
#endif

struct CasRequest {
    std::string script;
    std::chrono::seconds timeout{600};
    int digits = 150;
};

struct CasResponse {
    std::string raw;
    int exit_status = -1;
    std::string error_text;
    bool timed_out = false;
};

inline CasResponse run_cas(const CasRequest& req, const CasConfig& cfg) {
    auto res = subprocess::run(cfg.resolved_gp_path(), {"-q", "-f"}, req.script, req.timeout);
    if (res.launch_failed) throw CasUnavailable("cannot start CAS '" + cfg.resolved_gp_path() + "': " + res.error_text);
    return CasResponse{res.out, res.exit_status, res.err, res.timed_out};
}

inline FieldDataFixture load_fixture_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FixtureMissing("no fixture at " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_fixture(ss.str());
}

/// Single writer per file: the text goes to a unique temporary next to the
/// target and is renamed over it.
inline void write_fixture_file(const std::filesystem::path& dir, const FieldDataFixture& fx) {
    std::filesystem::create_directories(dir);
    static std::atomic<unsigned> counter{0};
    auto target = dir / fx.file_name();
    auto tmp = dir / (fx.file_name() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << serialize(fx);
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

/// Checks the stored provenance against the script this build would run.
inline void validate_provenance(const FieldDataFixture& fx, long f, long q) {
    if (fx.f != f || fx.q != q)
        throw HashMismatch("fixture is for (" + std::to_string(fx.f) + ", " + std::to_string(fx.q) + ")");
    const std::string expected = script_hash(f, q, fx.digits);
    if (fx.script_sha256 != expected)
        throw HashMismatch("fixture " + fx.file_name() + " was produced by a different script (" + fx.script_sha256 + " vs " + expected + ")");
}

inline FieldDataFixture fetch_field_data(long f, long q, int digits, FetchMode mode, const CasConfig& cfg = {}) {
    const auto dir = cfg.fixture_dir.empty() ? default_fixture_dir() : cfg.fixture_dir;
    const auto path = dir / (std::to_string(f) + "_" + std::to_string(q) + ".fixture");
    if (std::filesystem::exists(path)) {
        auto fx = load_fixture_file(path);
        validate_provenance(fx, f, q);
        return fx;
    }
    if (mode == FetchMode::FixtureOnly) throw FixtureMissing("no fixture for (" + std::to_string(f) + ", " + std::to_string(q) + ") in " + dir.string());

    std::vector<int> ladder{digits};
    if (cfg.escalated_digits > digits) ladder.push_back(cfg.escalated_digits);
    std::string last_error;
    for (int d : ladder) {
        CasRequest req{build_case_script(f, q, d), cfg.timeout, d};
        auto resp = run_cas(req, cfg);
        if (resp.timed_out) throw CasUnavailable("CAS timed out after " + std::to_string(cfg.timeout.count()) + " s");
        if (resp.exit_status != 0) throw CasUnavailable("CAS exited with status " + std::to_string(resp.exit_status) + ": " + resp.error_text);
        try {
            auto fx = parse_cas_output(resp.raw, d);
            write_fixture_file(dir, fx);
            return fx;
        } catch (const UnstableOutput& e) {
            last_error = e.what();
        }
    }
    throw UnstableOutput("CAS output unstable up to " + std::to_string(ladder.back()) + " digits: " + last_error);
}

/// Fetches several cases with at most `jobs` subprocesses in flight.
/// Results and errors come back in input order.
struct FetchOutcome {
    std::optional<FieldDataFixture> fixture;
    std::string error;
};

inline std::vector<FetchOutcome> fetch_many(const std::vector<std::pair<long, long>>& cases, int digits, FetchMode mode,
                                            const CasConfig& cfg = {}, unsigned jobs = 0) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    std::vector<FetchOutcome> out(cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cases.size();) {
            try {
                out[i].fixture = fetch_field_data(cases[i].first, cases[i].second, digits, mode, cfg);
            } catch (const std::exception& e) {
                out[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(jobs, cases.size()); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace ramc::casbridge
