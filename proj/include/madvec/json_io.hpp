#pragma once

// JSON serialization for every artifact the library exchanges with files:
// vectors, bases, stream presets, certificates, families, witnesses, game
// transcripts, and poset conditions.  All writers produce canonical bytes
// (alphabetically ordered keys, two-space indent, trailing newline) so that
// identical values serialize to identical files; all readers validate
// strictly and throw InvalidArgumentError on any schema violation.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include <madvec/echelon.hpp>
#include <madvec/errors.hpp>
#include <madvec/extension.hpp>
#include <madvec/fields.hpp>
#include <madvec/fin.hpp>
#include <madvec/games.hpp>
#include <madvec/madlab.hpp>
#include <madvec/posets.hpp>
#include <madvec/streams.hpp>
#include <madvec/vectors.hpp>

namespace madvec {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "madvec 0.1.0";

// ---------------------------------------------------------------------------
// Canonical bytes and digests.

/// The one serialization used everywhere a file is written: keys in sorted
/// order (nlohmann's default object is a sorted map), two-space indent, and
/// a final newline.  Equal values give equal bytes.
inline std::string json_bytes(const Json& j) { return j.dump(2) + "\n"; }

/// FNV-1a, 64-bit: the digest recorded in run manifests.  Recomputable by
/// anyone from the file bytes alone.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string digest_hex(std::string_view bytes) {
    static const char* hex = "0123456789abcdef";
    std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Strict accessors.  Every reader goes through these so that malformed input
// fails with a message naming the offending field.

namespace jsondetail {

inline const Json& require_key(const Json& j, const char* key, const char* what) {
    if (!j.is_object())
        throw InvalidArgumentError(std::string(what) + ": expected an object");
    auto it = j.find(key);
    if (it == j.end())
        throw InvalidArgumentError(std::string(what) + ": missing field \"" + key + "\"");
    return *it;
}

inline std::size_t require_index(const Json& j, const char* what) {
    if (j.is_number_unsigned()) return j.get<std::size_t>();
    if (j.is_number_integer() && j.get<long long>() >= 0)
        return static_cast<std::size_t>(j.get<long long>());
    throw InvalidArgumentError(std::string(what) + ": expected a nonnegative integer, got " +
                               j.dump());
}

inline std::string require_string(const Json& j, const char* what) {
    if (!j.is_string())
        throw InvalidArgumentError(std::string(what) + ": expected a string, got " + j.dump());
    return j.get<std::string>();
}

inline const Json& require_array(const Json& j, const char* what) {
    if (!j.is_array())
        throw InvalidArgumentError(std::string(what) + ": expected an array, got " + j.dump());
    return j;
}

inline bool require_bool(const Json& j, const char* what) {
    if (!j.is_boolean())
        throw InvalidArgumentError(std::string(what) + ": expected a boolean, got " + j.dump());
    return j.get<bool>();
}

}  // namespace jsondetail

// ---------------------------------------------------------------------------
// Vectors: {"v": [[index, "coeff"], ...]} with strictly increasing indices
// and coefficient text in the field encoding (decimal residue over GF(p),
// "a/b" over the rationals with "/b" dropped when the denominator is 1).

inline Json vector_to_json(const SparseVector& x) {
    Json entries = Json::array();
    for (const auto& [i, c] : x.entries()) entries.push_back(Json::array({i, c.str()}));
    return Json{{"v", std::move(entries)}};
}

inline SparseVector vector_from_json(FieldSpec spec, const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_index;
    using jsondetail::require_key;
    using jsondetail::require_string;
    const Json& arr = require_array(require_key(j, "v", "vector"), "vector field \"v\"");
    std::vector<SparseVector::Entry> entries;
    std::optional<std::size_t> prev;
    for (const Json& e : arr) {
        require_array(e, "vector entry");
        if (e.size() != 2)
            throw InvalidArgumentError("vector entry must be [index, \"coeff\"], got " +
                                       e.dump());
        std::size_t idx = require_index(e[0], "vector entry index");
        Scalar c = Scalar::parse(spec, require_string(e[1], "vector entry coefficient"));
        if (c.is_zero())
            throw InvalidArgumentError("vector entry at index " + std::to_string(idx) +
                                       " has zero coefficient");
        if (prev && idx <= *prev)
            throw InvalidArgumentError("vector entry indices must strictly increase, got " +
                                       std::to_string(idx) + " after " + std::to_string(*prev));
        prev = idx;
        entries.emplace_back(idx, std::move(c));
    }
    return SparseVector::make(spec, std::move(entries));
}

inline Json vector_list_to_json(const std::vector<SparseVector>& xs) {
    Json arr = Json::array();
    for (const auto& x : xs) arr.push_back(vector_to_json(x));
    return arr;
}

inline std::vector<SparseVector> vector_list_from_json(FieldSpec spec, const Json& j,
                                                       const char* what = "vector list") {
    jsondetail::require_array(j, what);
    std::vector<SparseVector> out;
    out.reserve(j.size());
    for (const Json& e : j) out.push_back(vector_from_json(spec, e));
    return out;
}

// ---------------------------------------------------------------------------
// Bases: {"basis": [vector, ...]} with rows already in reduced form and in
// pivot order; anything else is rejected (from_rows validates).

inline Json basis_to_json(const EchelonBasis& b) {
    return Json{{"basis", vector_list_to_json(b.rows())}};
}

inline EchelonBasis basis_from_json(FieldSpec spec, const Json& j) {
    const Json& rows = jsondetail::require_key(j, "basis", "basis");
    return EchelonBasis::from_rows(spec, vector_list_from_json(spec, rows, "basis rows"));
}

// ---------------------------------------------------------------------------
// Stream presets.  Only pure descriptions have a file form; presets wrapping
// in-memory callbacks (block-generator, canonicalized) are API-only.

inline Json preset_to_json(const Preset& p) {
    if (!p.serializable())
        throw InvalidArgumentError("preset kind '" + p.kind_name() +
                                   "' wraps an in-memory callback and has no file form");
    struct Writer {
        Json operator()(const DiagonalResiduePreset& d) {
            return Json{{"kind", "diagonal-residue"}, {"r", d.r}, {"m", d.m}};
        }
        Json operator()(const DiagonalIndexSetPreset& d) {
            return Json{{"kind", "diagonal-indexset"}, {"ix", d.ix}, {"k", d.k}};
        }
        Json operator()(const PatternPreset& d) {
            Json terms = Json::array();
            for (const auto& [off, coeff] : d.terms) terms.push_back(Json::array({off, coeff}));
            return Json{{"kind", "pattern"}, {"m", d.m}, {"terms", std::move(terms)}};
        }
        Json operator()(const PerfectBranchPreset& d) {
            return Json{{"kind", "perfect-branch"}, {"bits", d.bits}};
        }
        Json operator()(const TailPreset& d) {
            return Json{{"kind", "tail"}, {"of", preset_to_json(*d.of)}, {"above", d.above}};
        }
        Json operator()(const BlockGeneratorPreset&) { return Json(); }   // unreachable
        Json operator()(const CanonicalizedPreset&) { return Json(); }    // unreachable
    };
    return std::visit(Writer{}, p.kind());
}

inline Preset preset_from_json(const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_index;
    using jsondetail::require_key;
    using jsondetail::require_string;
    std::string kind = require_string(require_key(j, "kind", "preset"), "preset kind");
    if (kind == "diagonal-residue") {
        return Preset::diagonal_residue(
            require_index(require_key(j, "r", "diagonal-residue preset"), "field \"r\""),
            require_index(require_key(j, "m", "diagonal-residue preset"), "field \"m\""));
    }
    if (kind == "diagonal-indexset") {
        return Preset::diagonal_indexset(
            require_string(require_key(j, "ix", "diagonal-indexset preset"), "field \"ix\""),
            require_index(require_key(j, "k", "diagonal-indexset preset"), "field \"k\""));
    }
    if (kind == "pattern") {
        std::size_t m = require_index(require_key(j, "m", "pattern preset"), "field \"m\"");
        const Json& terms = require_array(require_key(j, "terms", "pattern preset"),
                                          "pattern terms");
        std::vector<std::pair<std::size_t, std::string>> parsed;
        for (const Json& t : terms) {
            require_array(t, "pattern term");
            if (t.size() != 2)
                throw InvalidArgumentError("pattern term must be [offset, \"coeff\"], got " +
                                           t.dump());
            parsed.emplace_back(require_index(t[0], "pattern term offset"),
                                require_string(t[1], "pattern term coefficient"));
        }
        return Preset::pattern(m, std::move(parsed));
    }
    if (kind == "perfect-branch") {
        return Preset::perfect_branch(
            require_string(require_key(j, "bits", "perfect-branch preset"), "field \"bits\""));
    }
    if (kind == "tail") {
        Preset inner = preset_from_json(require_key(j, "of", "tail preset"));
        return Preset::tail(inner,
                            require_index(require_key(j, "above", "tail preset"),
                                          "field \"above\""));
    }
    if (kind == "block-generator" || kind == "canonicalized")
        throw InvalidArgumentError("preset kind '" + kind +
                                   "' is API-only and cannot be loaded from a file");
    throw InvalidArgumentError("unknown preset kind: '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Certificates: {"pair":[i,j],"bound":c,"depth":d,"dim":k}.

inline Json cert_to_json(const ADCertificate& c) {
    return Json{{"pair", Json::array({c.i, c.j})},
                {"bound", c.bound},
                {"depth", c.depth},
                {"dim", c.dim}};
}

inline ADCertificate cert_from_json(const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_index;
    using jsondetail::require_key;
    const Json& pair = require_array(require_key(j, "pair", "certificate"), "certificate pair");
    if (pair.size() != 2)
        throw InvalidArgumentError("certificate pair must be [i, j], got " + pair.dump());
    ADCertificate c;
    c.i = require_index(pair[0], "certificate pair");
    c.j = require_index(pair[1], "certificate pair");
    c.bound = require_index(require_key(j, "bound", "certificate"), "certificate bound");
    c.depth = require_index(require_key(j, "depth", "certificate"), "certificate depth");
    c.dim = require_index(require_key(j, "dim", "certificate"), "certificate dim");
    if (c.i == c.j)
        throw InvalidArgumentError("certificate pairs a member with itself: " +
                                   std::to_string(c.i));
    if (c.dim == 0 && c.bound != 0)
        throw InvalidArgumentError("certificate with trivial intersection must have bound 0");
    return c;
}

// ---------------------------------------------------------------------------
// Families: {"field":"gf2","members":[preset,...],"certs":[cert,...]}.

inline Json family_to_json(const ADFamily& fam) {
    Json members = Json::array();
    for (std::size_t i = 0; i < fam.size(); ++i)
        members.push_back(preset_to_json(fam.member_preset(i)));
    Json certs = Json::array();
    for (const auto& [key, c] : fam.certs()) certs.push_back(cert_to_json(c));
    return Json{{"field", fam.spec().name()},
                {"members", std::move(members)},
                {"certs", std::move(certs)}};
}

inline ADFamily family_from_json(const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_key;
    using jsondetail::require_string;
    FieldSpec spec =
        FieldSpec::parse(require_string(require_key(j, "field", "family"), "family field"));
    const Json& members = require_array(require_key(j, "members", "family"), "family members");
    std::vector<Preset> presets;
    for (const Json& m : members) presets.push_back(preset_from_json(m));
    ADFamily fam(spec, std::move(presets));
    const Json& certs = require_array(require_key(j, "certs", "family"), "family certs");
    for (const Json& c : certs) {
        ADCertificate cert = cert_from_json(c);
        if (cert.i >= fam.size() || cert.j >= fam.size())
            throw InvalidArgumentError("certificate pair (" + std::to_string(cert.i) + "," +
                                       std::to_string(cert.j) +
                                       ") exceeds the member count " +
                                       std::to_string(fam.size()));
        fam.set_cert(cert);
    }
    return fam;
}

// ---------------------------------------------------------------------------
// Witness files.  The file embeds the family so a third party can re-run
// every check from the file alone:
//   {"type":"witness-nonmax","family":{...},"xs":[vector,...],
//    "cutoff":M|null,
//    "checks":[{"k":i,"kind":"disjoint"} | {"k":i,"kind":"line","x":vector}]}

inline Json witness_to_json(const ADFamily& fam, const NonmaxWitness& w) {
    Json checks = Json::array();
    for (const auto& c : w.checks) {
        Json entry{{"k", c.k}, {"kind", c.line ? "line" : "disjoint"}};
        if (c.line) {
            if (!c.x)
                throw InvalidArgumentError("line check without its generator cannot be written");
            entry["x"] = vector_to_json(*c.x);
        }
        checks.push_back(std::move(entry));
    }
    Json out{{"type", "witness-nonmax"},
             {"family", family_to_json(fam)},
             {"xs", vector_list_to_json(w.xs)},
             {"checks", std::move(checks)}};
    out["cutoff"] = w.cutoff ? Json(*w.cutoff) : Json(nullptr);
    return out;
}

struct LoadedWitness {
    ADFamily family;
    NonmaxWitness witness;
};

inline LoadedWitness witness_from_json(const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_index;
    using jsondetail::require_key;
    using jsondetail::require_string;
    if (require_string(require_key(j, "type", "witness file"), "witness type") !=
        "witness-nonmax")
        throw InvalidArgumentError("witness file has wrong type tag");
    ADFamily fam = family_from_json(require_key(j, "family", "witness file"));
    FieldSpec spec = fam.spec();
    NonmaxWitness w;
    w.xs = vector_list_from_json(spec, require_key(j, "xs", "witness file"), "witness xs");
    const Json& cutoff = require_key(j, "cutoff", "witness file");
    if (!cutoff.is_null()) w.cutoff = require_index(cutoff, "witness cutoff");
    const Json& checks =
        require_array(require_key(j, "checks", "witness file"), "witness checks");
    for (const Json& c : checks) {
        WitnessCheck chk;
        chk.k = require_index(require_key(c, "k", "witness check"), "witness check k");
        std::string kind =
            require_string(require_key(c, "kind", "witness check"), "witness check kind");
        if (kind == "line") {
            chk.line = true;
            chk.x = vector_from_json(spec, require_key(c, "x", "line check"));
        } else if (kind == "disjoint") {
            chk.line = false;
            if (c.contains("x"))
                throw InvalidArgumentError("disjoint check must not carry a generator");
        } else {
            throw InvalidArgumentError("witness check kind must be \"disjoint\" or \"line\", "
                                       "got \"" +
                                       kind + "\"");
        }
        w.checks.push_back(std::move(chk));
    }
    return LoadedWitness{std::move(fam), std::move(w)};
}

// ---------------------------------------------------------------------------
// Deep-intersection certificates (the H-membership evidence), embedding the
// family for the same standalone re-verification reason:
//   {"type":"h-certificate","family":{...},"xs":[...],"depth":d,
//    "complete":b,"members":[{"member":m,"vectors":[...]},...]}

inline Json h_certificate_to_json(const ADFamily& fam, const std::vector<SparseVector>& xs,
                                  const HCertificate& cert) {
    Json members = Json::array();
    for (const auto& ev : cert.members)
        members.push_back(
            Json{{"member", ev.member}, {"vectors", vector_list_to_json(ev.vectors)}});
    return Json{{"type", "h-certificate"},
                {"family", family_to_json(fam)},
                {"xs", vector_list_to_json(xs)},
                {"depth", cert.depth},
                {"complete", cert.complete},
                {"members", std::move(members)}};
}

struct LoadedHCertificate {
    ADFamily family;
    std::vector<SparseVector> xs;
    HCertificate cert;
};

inline LoadedHCertificate h_certificate_from_json(const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_bool;
    using jsondetail::require_index;
    using jsondetail::require_key;
    using jsondetail::require_string;
    if (require_string(require_key(j, "type", "h-certificate"), "h-certificate type") !=
        "h-certificate")
        throw InvalidArgumentError("h-certificate file has wrong type tag");
    ADFamily fam = family_from_json(require_key(j, "family", "h-certificate"));
    FieldSpec spec = fam.spec();
    std::vector<SparseVector> xs = vector_list_from_json(
        spec, require_key(j, "xs", "h-certificate"), "h-certificate xs");
    HCertificate cert;
    cert.depth = require_index(require_key(j, "depth", "h-certificate"), "h-certificate depth");
    cert.complete =
        require_bool(require_key(j, "complete", "h-certificate"), "h-certificate complete");
    const Json& members =
        require_array(require_key(j, "members", "h-certificate"), "h-certificate members");
    for (const Json& m : members) {
        HEvidence ev;
        ev.member = require_index(require_key(m, "member", "h-certificate member"),
                                  "h-certificate member index");
        ev.vectors = vector_list_from_json(spec, require_key(m, "vectors", "h-certificate member"),
                                           "h-certificate member vectors");
        cert.members.push_back(std::move(ev));
    }
    return LoadedHCertificate{std::move(fam), std::move(xs), std::move(cert)};
}

// ---------------------------------------------------------------------------
// Diagonalization runs.  The file pins the family, the requested length, and
// everything the construction produced; since the dominating function is
// computed canonically from the family, a verifier can replay the whole run
// and demand byte-equality:
//   {"type":"diagonal-run","family":{...},"len":N,"xs":[vector,...],
//    "h_used":[[n,h(n)],...],"cases":[{"member":m,"hits":[j,...]},...]}

inline Json diagonal_run_to_json(const ADFamily& fam, std::size_t len,
                                 const DiagonalizeResult& r) {
    Json h_used = Json::array();
    for (const auto& [n, h] : r.h_used) h_used.push_back(Json::array({n, h}));
    Json cases = Json::array();
    for (const auto& t : r.cases) {
        Json hits = Json::array();
        for (std::size_t j : t.hits) hits.push_back(j);
        cases.push_back(Json{{"member", t.member}, {"hits", std::move(hits)}});
    }
    return Json{{"type", "diagonal-run"},
                {"family", family_to_json(fam)},
                {"len", len},
                {"xs", vector_list_to_json(r.xs)},
                {"h_used", std::move(h_used)},
                {"cases", std::move(cases)}};
}

struct LoadedDiagonalRun {
    ADFamily family;
    std::size_t len = 0;
    DiagonalizeResult result;
};

inline LoadedDiagonalRun diagonal_run_from_json(const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_index;
    using jsondetail::require_key;
    using jsondetail::require_string;
    if (require_string(require_key(j, "type", "diagonal run"), "diagonal run type") !=
        "diagonal-run")
        throw InvalidArgumentError("diagonal-run file has wrong type tag");
    ADFamily fam = family_from_json(require_key(j, "family", "diagonal run"));
    LoadedDiagonalRun out{std::move(fam), 0, {}};
    out.len = require_index(require_key(j, "len", "diagonal run"), "diagonal run len");
    out.result.xs = vector_list_from_json(out.family.spec(),
                                          require_key(j, "xs", "diagonal run"),
                                          "diagonal run xs");
    for (const Json& e :
         require_array(require_key(j, "h_used", "diagonal run"), "diagonal run h_used")) {
        require_array(e, "h_used entry");
        if (e.size() != 2)
            throw InvalidArgumentError("h_used entry must be [n, h], got " + e.dump());
        out.result.h_used.emplace_back(require_index(e[0], "h_used argument"),
                                       require_index(e[1], "h_used value"));
    }
    for (const Json& c :
         require_array(require_key(j, "cases", "diagonal run"), "diagonal run cases")) {
        MemberTrace t;
        t.member = require_index(require_key(c, "member", "diagonal run case"),
                                 "case member");
        for (const Json& h :
             require_array(require_key(c, "hits", "diagonal run case"), "case hits"))
            t.hits.push_back(require_index(h, "case hit"));
        out.result.cases.push_back(std::move(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite-union combinatorics: a block is a sorted integer array, a block
// sequence an array of blocks.

inline Json block_to_json(const FinBlock& b) {
    Json arr = Json::array();
    for (std::size_t n : b.elements()) arr.push_back(n);
    return arr;
}

inline FinBlock block_from_json(const Json& j) {
    jsondetail::require_array(j, "block");
    std::vector<std::size_t> elems;
    std::optional<std::size_t> prev;
    for (const Json& e : j) {
        std::size_t n = jsondetail::require_index(e, "block element");
        if (prev && n <= *prev)
            throw InvalidArgumentError("block elements must strictly increase, got " +
                                       std::to_string(n) + " after " + std::to_string(*prev));
        prev = n;
        elems.push_back(n);
    }
    return FinBlock::make(std::move(elems));
}

inline Json blockseq_to_json(const FinBlockSeq& s) {
    Json arr = Json::array();
    for (const auto& b : s.blocks()) arr.push_back(block_to_json(b));
    return arr;
}

inline FinBlockSeq blockseq_from_json(const Json& j) {
    jsondetail::require_array(j, "block sequence");
    std::vector<FinBlock> blocks;
    for (const Json& b : j) blocks.push_back(block_from_json(b));
    return FinBlockSeq::make(std::move(blocks));
}

// ---------------------------------------------------------------------------
// Game transcripts, with the full move list:
//   {"type":"game-transcript","kind":"gowers"|"asymptotic","field":...,
//    "arena":preset,
//    "rounds":[{"offered":[vector,...],"reply":vector}      (gowers)
//            | {"bound":n,"reply":vector}]}                 (asymptotic)
// A gowers round records the offered rows player II actually inspected; the
// replay validator checks they are reduced, lie in the arena, and span II's
// reply.

inline Json transcript_to_json(const GameTranscript& t) {
    Json rounds = Json::array();
    for (const auto& r : t.rounds()) {
        if (t.kind() == GameKind::Gowers)
            rounds.push_back(
                Json{{"offered", vector_list_to_json(r.offered)}, {"reply", vector_to_json(r.reply)}});
        else
            rounds.push_back(Json{{"bound", r.bound}, {"reply", vector_to_json(r.reply)}});
    }
    return Json{{"type", "game-transcript"},
                {"kind", game_kind_name(t.kind())},
                {"field", t.spec().name()},
                {"arena", preset_to_json(t.arena())},
                {"rounds", std::move(rounds)}};
}

inline GameTranscript transcript_from_json(const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_index;
    using jsondetail::require_key;
    using jsondetail::require_string;
    if (require_string(require_key(j, "type", "transcript"), "transcript type") !=
        "game-transcript")
        throw InvalidArgumentError("transcript file has wrong type tag");
    std::string kind_name =
        require_string(require_key(j, "kind", "transcript"), "transcript kind");
    GameKind kind;
    if (kind_name == "gowers")
        kind = GameKind::Gowers;
    else if (kind_name == "asymptotic")
        kind = GameKind::Asymptotic;
    else
        throw InvalidArgumentError("transcript kind must be \"gowers\" or \"asymptotic\", got \"" +
                                   kind_name + "\"");
    FieldSpec spec = FieldSpec::parse(
        require_string(require_key(j, "field", "transcript"), "transcript field"));
    Preset arena = preset_from_json(require_key(j, "arena", "transcript"));
    GameTranscript t(kind, spec, std::move(arena));
    const Json& rounds =
        require_array(require_key(j, "rounds", "transcript"), "transcript rounds");
    for (const Json& r : rounds) {
        RoundRecord rec{{}, 0, SparseVector(spec)};
        if (kind == GameKind::Gowers) {
            if (r.contains("bound"))
                throw InvalidArgumentError("gowers round must not carry an integer bound");
            rec.offered = vector_list_from_json(spec, require_key(r, "offered", "gowers round"),
                                                "offered rows");
        } else {
            if (r.contains("offered"))
                throw InvalidArgumentError("asymptotic round must not carry offered rows");
            rec.bound =
                require_index(require_key(r, "bound", "asymptotic round"), "round bound");
        }
        rec.reply = vector_from_json(spec, require_key(r, "reply", "round"));
        t.append(std::move(rec));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Poset conditions.
//
// Pair-extension conditions (finite core + finitely many members to avoid):
//   {"type":"map-condition","field":...,"s":[vector,...],"F":[member,...]}
//
// Table conditions: {"F":[["a1",0],["a1",1]],"n":2,"rows":{"a1,0":[vec,...]}}
// plus a "field" key; "n" is the common row length and the "rows" keys are
// exactly the "label,beta" renderings of the F entries.

inline Json map_condition_to_json(const MAPCondition& p) {
    Json F = Json::array();
    for (std::size_t i : p.F()) F.push_back(i);
    return Json{{"type", "map-condition"},
                {"field", p.spec().name()},
                {"s", vector_list_to_json(p.s())},
                {"F", std::move(F)}};
}

inline MAPCondition map_condition_from_json(const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_index;
    using jsondetail::require_key;
    using jsondetail::require_string;
    if (require_string(require_key(j, "type", "condition"), "condition type") != "map-condition")
        throw InvalidArgumentError("condition file has wrong type tag");
    FieldSpec spec = FieldSpec::parse(
        require_string(require_key(j, "field", "condition"), "condition field"));
    std::vector<SparseVector> s =
        vector_list_from_json(spec, require_key(j, "s", "condition"), "condition core");
    const Json& F = require_array(require_key(j, "F", "condition"), "condition F");
    std::set<std::size_t> members;
    for (const Json& e : F)
        if (!members.insert(require_index(e, "condition member index")).second)
            throw InvalidArgumentError("condition F lists a member twice");
    return MAPCondition::make(spec, std::move(s), std::move(members));
}

inline std::string q_pair_key(const QCondition::Pair& p) {
    return p.first + "," + std::to_string(p.second);
}

inline Json q_condition_to_json(const QCondition& p) {
    Json F = Json::array();
    Json rows = Json::object();
    for (const auto& [key, row] : p.table()) {
        F.push_back(Json::array({key.first, key.second}));
        rows[q_pair_key(key)] = vector_list_to_json(row);
    }
    return Json{{"field", p.spec().name()},
                {"n", p.height()},
                {"F", std::move(F)},
                {"rows", std::move(rows)}};
}

inline QCondition q_condition_from_json(const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_index;
    using jsondetail::require_key;
    using jsondetail::require_string;
    FieldSpec spec = FieldSpec::parse(
        require_string(require_key(j, "field", "condition"), "condition field"));
    std::size_t height = require_index(require_key(j, "n", "condition"), "condition n");
    const Json& F = require_array(require_key(j, "F", "condition"), "condition F");
    const Json& rows = require_key(j, "rows", "condition");
    if (!rows.is_object())
        throw InvalidArgumentError("condition rows must be an object keyed by \"label,beta\"");
    QCondition::Table table;
    for (const Json& e : F) {
        require_array(e, "condition F entry");
        if (e.size() != 2)
            throw InvalidArgumentError("condition F entry must be [label, beta], got " +
                                       e.dump());
        QCondition::Pair pair{require_string(e[0], "condition label"),
                              require_index(e[1], "condition beta")};
        std::string key = q_pair_key(pair);
        auto it = rows.find(key);
        if (it == rows.end())
            throw InvalidArgumentError("condition has no row for listed pair \"" + key + "\"");
        auto [pos, fresh] =
            table.emplace(pair, vector_list_from_json(spec, *it, "condition row"));
        if (!fresh)
            throw InvalidArgumentError("condition F lists the pair \"" + key + "\" twice");
    }
    if (rows.size() != table.size())
        throw InvalidArgumentError("condition rows carry pairs absent from F");
    return QCondition::make(spec, height, std::move(table));
}

// ---------------------------------------------------------------------------
// File plumbing.

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgumentError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgumentError("cannot open file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidArgumentError("malformed JSON in " + path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgumentError("cannot write file: " + path);
    out << json_bytes(j);
    if (!out) throw InvalidArgumentError("short write to file: " + path);
}

// ---------------------------------------------------------------------------
// Run manifests.  The one place a timestamp lives: result payloads stay
// byte-identical across reruns, the manifest records when this run happened
// and the digests tying it to its input and output files.

struct ManifestEntry {
    std::string path;
    std::string digest;
};

struct RunManifest {
    std::string command;
    std::string field;
    std::vector<ManifestEntry> inputs;
    std::vector<ManifestEntry> outputs;
    std::string version = kToolVersion;
    std::string generated;  // ISO-8601 UTC; empty means "not recorded"
};

inline Json manifest_to_json(const RunManifest& m) {
    auto entries = [](const std::vector<ManifestEntry>& es) {
        Json arr = Json::array();
        for (const auto& e : es) arr.push_back(Json{{"path", e.path}, {"digest", e.digest}});
        return arr;
    };
    return Json{{"type", "run-manifest"},
                {"command", m.command},
                {"field", m.field},
                {"inputs", entries(m.inputs)},
                {"outputs", entries(m.outputs)},
                {"version", m.version},
                {"generated", m.generated}};
}

inline RunManifest manifest_from_json(const Json& j) {
    using jsondetail::require_array;
    using jsondetail::require_key;
    using jsondetail::require_string;
    if (require_string(require_key(j, "type", "manifest"), "manifest type") != "run-manifest")
        throw InvalidArgumentError("manifest file has wrong type tag");
    RunManifest m;
    m.command = require_string(require_key(j, "command", "manifest"), "manifest command");
    m.field = require_string(require_key(j, "field", "manifest"), "manifest field");
    m.version = require_string(require_key(j, "version", "manifest"), "manifest version");
    m.generated = require_string(require_key(j, "generated", "manifest"), "manifest generated");
    auto entries = [](const Json& arr, const char* what) {
        std::vector<ManifestEntry> out;
        for (const Json& e : jsondetail::require_array(arr, what)) {
            ManifestEntry entry;
            entry.path = jsondetail::require_string(jsondetail::require_key(e, "path", what),
                                                    "manifest entry path");
            entry.digest = jsondetail::require_string(
                jsondetail::require_key(e, "digest", what), "manifest entry digest");
            out.push_back(std::move(entry));
        }
        return out;
    };
    m.inputs = entries(require_key(j, "inputs", "manifest"), "manifest inputs");
    m.outputs = entries(require_key(j, "outputs", "manifest"), "manifest outputs");
    return m;
}

}  // namespace madvec
