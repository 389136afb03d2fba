// madvec: batch front end for the library.  Reads and writes the documented
// JSON formats, emits a run manifest next to every file it writes, and keeps
// result payloads byte-deterministic (timestamps live only in manifests).
//
// Exit codes: 0 success, 1 verification or construction failure, 2 malformed
// input or bad usage.

#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <madvec/json_io.hpp>
#include <madvec/verify.hpp>

namespace {

using namespace madvec;

std::string now_iso8601_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Accumulates the manifest while a command loads its inputs.
struct Run {
    std::string command;
    std::string field_name = "gf2";
    std::vector<ManifestEntry> inputs;

    Json load(const std::string& path) {
        std::string bytes = read_file_bytes(path);
        // manifests claim digests by path; inputs may live anywhere, so they
        // are recorded absolute, while outputs sit next to the manifest and
        // are recorded by bare name (the pair stays verifiable when moved)
        inputs.push_back({std::filesystem::absolute(path).string(), digest_hex(bytes)});
        try {
            return Json::parse(bytes);
        } catch (const Json::parse_error& e) {
            throw InvalidArgumentError("malformed JSON in " + path + ": " + e.what());
        }
    }

    /// Writes (or prints) the result payload.  Every emitted artifact must
    /// pass independent verification first; a failure here is a bug, so it
    /// aborts the command rather than writing an unverifiable file.
    int emit(const Json& result, const std::string& out, FieldSpec field) {
        VerifyReport self = verify_artifact(result, field);
        if (!self.ok)
            throw CertificateError("refusing to emit an artifact that fails verification: " +
                                   self.detail);
        if (out.empty()) {
            std::cout << json_bytes(result);
            return 0;
        }
        write_json_file(out, result);
        RunManifest m;
        m.command = command;
        m.field = field_name;
        m.inputs = inputs;
        m.outputs.push_back(
            {std::filesystem::path(out).filename().string(), digest_hex(json_bytes(result))});
        m.generated = now_iso8601_utc();
        write_json_file(out + ".manifest.json", manifest_to_json(m));
        return 0;
    }
};

/// Loads a family file and resolves its field.
ADFamily load_family(Run& run, const std::string& path) {
    ADFamily fam = family_from_json(run.load(path));
    run.field_name = fam.spec().name();
    return fam;
}

/// Reads one side of an intersection: a preset file (cut at `depth` rows), a
/// reduced basis file, or a plain vector list (reduced here).
EchelonBasis load_space(Run& run, const std::string& path, FieldSpec field,
                        std::size_t depth) {
    Json doc = run.load(path);
    if (doc.is_object() && doc.contains("kind")) {
        SubspaceStream s(preset_from_json(doc), field);
        return s.prefix(depth);
    }
    if (doc.is_object() && doc.contains("basis")) return basis_from_json(field, doc);
    if (doc.is_object() && doc.contains("vectors"))
        return rref(field, vector_list_from_json(field, doc["vectors"], "vectors"));
    throw InvalidArgumentError(path +
                               ": expected a preset, a basis, or a vectors file");
}

std::vector<SparseVector> load_vectors(Run& run, const std::string& path, FieldSpec field) {
    Json doc = run.load(path);
    if (!doc.is_object() || !doc.contains("vectors"))
        throw InvalidArgumentError(path + ": expected {\"vectors\": [vector, ...]}");
    return vector_list_from_json(field, doc["vectors"], "vectors");
}

int run_verify_paths(const std::vector<std::string>& paths, FieldSpec field) {
    bool all_ok = true;
    for (const std::string& path : paths) {
        VerifyReport r = verify_file(path, field);
        Json line{{"path", path}, {"type", r.type}, {"ok", r.ok}, {"detail", r.detail}};
        std::cout << json_bytes(line);
        if (!r.ok) all_ok = false;
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace madvec;
    Fuel::reset_from_env();

    CLI::App app{"exact streams, certificates, witnesses, games, and posets over ⊕_ω F"};
    app.require_subcommand(1);
    std::function<int()> action;

    // Shared option storage.  Each subcommand binds the subset it uses.
    std::string field_name = "gf2", out, in_path, a_path, b_path, family_path;
    std::string condition_path, arena_path, transcript_path, seq_path, label, kind_name;
    std::string strat_i, strat_ii;
    std::size_t member = 0, k = 0, len = 0, rounds = 0, depth = 32, cutoff = 24;
    std::size_t upto = 0, min_level = 0, beta = 0;
    bool countable = false;

    auto field = [&] { return FieldSpec::parse(field_name); };

    // ---- rref ------------------------------------------------------------
    auto* rref_cmd = app.add_subcommand("rref", "reduce a vector list to its echelon basis");
    rref_cmd->add_option("--in", in_path, "vectors file")->required();
    rref_cmd->add_option("--field", field_name, "field name (gf<p> or q)");
    rref_cmd->add_option("--out", out, "output file (stdout when omitted)");
    rref_cmd->callback([&] {
        action = [&]() -> int {
            Run run{"rref", field_name, {}};
            EchelonBasis b = rref(field(), load_vectors(run, in_path, field()));
            return run.emit(basis_to_json(b), out, field());
        };
    });

    // ---- intersect -------------------------------------------------------
    auto* isc = app.add_subcommand(
        "intersect", "intersect two spaces, or certify all pairs of a family");
    isc->add_option("--a", a_path, "first space (preset, basis, or vectors file)");
    isc->add_option("--b", b_path, "second space");
    isc->add_option("--family", family_path, "family file to certify pairwise");
    isc->add_option("--depth", depth, "rows drawn from each stream (default 32)");
    isc->add_option("--field", field_name, "field name (gf<p> or q)");
    isc->add_option("--out", out, "output file (stdout when omitted)");
    isc->callback([&] {
        action = [&]() -> int {
            if (!family_path.empty()) {
                // Family construction: recompute every pairwise certificate at
                // the requested depth and emit the certified family file.
                Run run{"intersect", field_name, {}};
                ADFamily fam = load_family(run, family_path);
                std::vector<Preset> members;
                for (std::size_t i = 0; i < fam.size(); ++i)
                    members.push_back(fam.member_preset(i));
                ADFamily certified =
                    ADFamily::certified(fam.spec(), std::move(members), depth);
                return run.emit(family_to_json(certified), out, certified.spec());
            }
            if (a_path.empty() || b_path.empty())
                throw InvalidArgumentError(
                    "intersect needs either --a and --b, or --family");
            Run run{"intersect", field_name, {}};
            EchelonBasis A = load_space(run, a_path, field(), depth);
            EchelonBasis B = load_space(run, b_path, field(), depth);
            return run.emit(basis_to_json(intersect(A, B)), out, field());
        };
    });

    // ---- extend-bound ----------------------------------------------------
    auto* eb = app.add_subcommand("extend-bound",
                                  "window bound M for extending past a member");
    eb->add_option("--family", family_path, "family file")->required();
    eb->add_option("--member", member, "member index")->required();
    eb->add_option("--k", k, "window cut K")->required();
    eb->add_option("--out", out, "output file (stdout when omitted)");
    eb->callback([&] {
        action = [&]() -> int {
            Run run{"extend-bound", field_name, {}};
            ADFamily fam = load_family(run, family_path);
            SubspaceStream y = fam.stream(member);
            return run.emit(Json{{"M", extend_bound(y, k)}}, out, fam.spec());
        };
    });

    // ---- witness ---------------------------------------------------------
    auto* wit = app.add_subcommand("witness", "non-maximality witnesses");
    auto* nonmax = wit->add_subcommand("nonmax", "block sequence past every member");
    nonmax->add_option("--family", family_path, "family file")->required();
    nonmax->add_option("--len", len, "witness length")->required();
    nonmax->add_flag("--countable", countable,
                     "diagonal construction against the whole enumerated family");
    nonmax->add_option("--out", out, "output file (stdout when omitted)");
    nonmax->callback([&] {
        action = [&]() -> int {
            Run run{"witness nonmax", field_name, {}};
            ADFamily fam = load_family(run, family_path);
            NonmaxWitness w = countable ? witness_nonmax_countable(fam, len)
                                        : witness_nonmax_finite(fam, len);
            return run.emit(witness_to_json(fam, w), out, fam.spec());
        };
    });

    // ---- diagonalize -----------------------------------------------------
    auto* diag = app.add_subcommand(
        "diagonalize", "block sequence under the family's dominating function");
    diag->add_option("--family", family_path, "family file")->required();
    diag->add_option("--len", len, "number of picks")->required();
    diag->add_option("--out", out, "output file (stdout when omitted)");
    diag->callback([&] {
        action = [&]() -> int {
            Run run{"diagonalize", field_name, {}};
            ADFamily fam = load_family(run, family_path);
            DiagonalizeResult r = diagonalize_under(fam, dominating_h(fam), len);
            return run.emit(diagonal_run_to_json(fam, len, r), out, fam.spec());
        };
    });

    // ---- fin -------------------------------------------------------------
    auto* fin = app.add_subcommand("fin", "finite-union combinatorics");
    auto* fu = fin->add_subcommand("fu", "enumerate finite unions of a block sequence");
    fu->add_option("--seq", seq_path, "block-sequence file")->required();
    fu->add_option("--upto", upto, "number of leading blocks to combine")->required();
    fu->add_option("--out", out, "output file (stdout when omitted)");
    fu->callback([&] {
        action = [&]() -> int {
            Run run{"fin fu", field_name, {}};
            FinBlockSeq A = blockseq_from_json(run.load(seq_path));
            Json blocks = Json::array();
            for (const FinBlock& b : fu_enum(A, upto)) blocks.push_back(block_to_json(b));
            return run.emit(Json{{"blocks", std::move(blocks)}}, out, field());
        };
    });
    auto* ad = fin->add_subcommand("ad", "common finite unions below a cutoff");
    ad->add_option("--a", a_path, "first block-sequence file")->required();
    ad->add_option("--b", b_path, "second block-sequence file")->required();
    ad->add_option("--cutoff", cutoff, "only blocks below this bound enter")->required();
    ad->add_option("--out", out, "output file (stdout when omitted)");
    ad->callback([&] {
        action = [&]() -> int {
            Run run{"fin ad", field_name, {}};
            FinBlockSeq A = blockseq_from_json(run.load(a_path));
            FinBlockSeq B = blockseq_from_json(run.load(b_path));
            Json blocks = Json::array();
            for (const FinBlock& b : fin_ad_report(A, B, cutoff))
                blocks.push_back(block_to_json(b));
            return run.emit(Json{{"blocks", std::move(blocks)}}, out, field());
        };
    });
    auto* supp = fin->add_subcommand("supp", "support blocks of a vector block sequence");
    supp->add_option("--vectors", in_path, "vectors file")->required();
    supp->add_option("--field", field_name, "field name (gf<p> or q)");
    supp->add_option("--out", out, "output file (stdout when omitted)");
    supp->callback([&] {
        action = [&]() -> int {
            Run run{"fin supp", field_name, {}};
            FinBlockSeq A = supp_of_blockseq(load_vectors(run, in_path, field()));
            return run.emit(blockseq_to_json(A), out, field());
        };
    });
    auto* lift = fin->add_subcommand(
        "lift", "lift a block sequence of supports back into the span");
    lift->add_option("--vectors", in_path, "vectors file")->required();
    lift->add_option("--seq", seq_path, "block-sequence file to lift")->required();
    lift->add_option("--field", field_name, "field name (gf<p> or q)");
    lift->add_option("--out", out, "output file (stdout when omitted)");
    lift->callback([&] {
        action = [&]() -> int {
            Run run{"fin lift", field_name, {}};
            std::vector<SparseVector> X = load_vectors(run, in_path, field());
            FinBlockSeq A = blockseq_from_json(run.load(seq_path));
            return run.emit(Json{{"vectors", vector_list_to_json(lift_supp(X, A))}}, out,
                            field());
        };
    });

    // ---- game ------------------------------------------------------------
    auto* game = app.add_subcommand("game", "subspace and asymptotic games");
    auto* gp = game->add_subcommand("play", "play two named strategies against each other");
    gp->add_option("--kind", kind_name, "gowers | asymptotic")->required();
    gp->add_option("--arena", arena_path, "arena preset file")->required();
    gp->add_option("--strat-i", strat_i,
                   "player I strategy: arena-offer | into-h | into-abar | counting-bound")
        ->required();
    gp->add_option("--strat-ii", strat_ii,
                   "player II strategy: first-row | first-element | into-abar")
        ->required();
    gp->add_option("--rounds", rounds, "rounds to play")->required();
    gp->add_option("--family", family_path, "family file (for family-driven strategies)");
    gp->add_option("--member", member, "member index (for into-abar)");
    gp->add_option("--depth", depth, "certification depth for into-h (default 2)")
        ->default_val(2);
    gp->add_option("--cutoff", cutoff, "working depth for window intersections (default 24)");
    gp->add_option("--field", field_name, "field name (gf<p> or q)");
    gp->add_option("--out", out, "output file (stdout when omitted)");
    gp->callback([&] {
        action = [&]() -> int {
            Run run{"game play", field_name, {}};
            GameKind gk;
            if (kind_name == "gowers")
                gk = GameKind::Gowers;
            else if (kind_name == "asymptotic")
                gk = GameKind::Asymptotic;
            else
                throw InvalidArgumentError("--kind must be gowers or asymptotic, got '" +
                                           kind_name + "'");
            Preset arena = preset_from_json(run.load(arena_path));
            std::optional<ADFamily> fam;
            if (!family_path.empty()) fam = load_family(run, family_path);
            FieldSpec spec = fam ? fam->spec() : field();
            auto need_family = [&](const char* who) -> const ADFamily& {
                if (!fam)
                    throw InvalidArgumentError(std::string(who) +
                                               " needs --family");
                return *fam;
            };
            SubspaceStream X(arena, spec);

            std::optional<StrategyI> one;
            if (strat_i == "arena-offer")
                one = arena_offer_strategy();
            else if (strat_i == "counting-bound")
                one = counting_bound_strategy();
            else if (strat_i == "into-h")
                one = strat_I_into_H(need_family("into-h"), X, depth, cutoff);
            else if (strat_i == "into-abar")
                one = strat_pair_into_Abar(member, need_family("into-abar"), cutoff).first;
            else
                throw InvalidArgumentError("unknown player I strategy '" + strat_i + "'");

            std::optional<StrategyII> two;
            if (strat_ii == "first-row")
                two = first_row_reply_strategy();
            else if (strat_ii == "first-element")
                two = strat_II_first_element(need_family("first-element"));
            else if (strat_ii == "into-abar")
                two = strat_pair_into_Abar(member, need_family("into-abar"), cutoff).second;
            else
                throw InvalidArgumentError("unknown player II strategy '" + strat_ii + "'");

            GameTranscript t = play(gk, X, *one, *two, rounds);
            return run.emit(transcript_to_json(t), out, spec);
        };
    });
    auto* gr = game->add_subcommand("replay", "re-validate a recorded transcript");
    gr->add_option("--transcript", transcript_path, "transcript file")->required();
    gr->add_option("--field", field_name, "field name (gf<p> or q)");
    gr->callback([&] {
        action = [&]() -> int {
            return run_verify_paths({transcript_path}, FieldSpec::parse(field_name));
        };
    });

    // ---- poset -----------------------------------------------------------
    auto* poset = app.add_subcommand("poset", "forcing-style condition manipulation");
    auto* mext = poset->add_subcommand("map-extend",
                                       "lengthen a condition core past its members");
    mext->add_option("--condition", condition_path, "condition file")->required();
    mext->add_option("--family", family_path, "family file")->required();
    mext->add_option("--out", out, "output file (stdout when omitted)");
    mext->callback([&] {
        action = [&]() -> int {
            Run run{"poset map-extend", field_name, {}};
            ADFamily fam = load_family(run, family_path);
            MAPCondition p = map_condition_from_json(run.load(condition_path));
            return run.emit(map_condition_to_json(map_extend(p, fam)), out, fam.spec());
        };
    });
    auto* madd = poset->add_subcommand("map-add", "add a member to a condition's side set");
    madd->add_option("--condition", condition_path, "condition file")->required();
    madd->add_option("--family", family_path, "family file")->required();
    madd->add_option("--member", member, "member index to add")->required();
    madd->add_option("--out", out, "output file (stdout when omitted)");
    madd->callback([&] {
        action = [&]() -> int {
            Run run{"poset map-add", field_name, {}};
            ADFamily fam = load_family(run, family_path);
            MAPCondition p = map_condition_from_json(run.load(condition_path));
            return run.emit(map_condition_to_json(map_add_member(p, member, fam)), out,
                            fam.spec());
        };
    });
    auto* qext = poset->add_subcommand("q-extend", "add one level above a floor");
    qext->add_option("--condition", condition_path, "condition file")->required();
    qext->add_option("--min", min_level, "floor for the new level")->required();
    qext->add_option("--out", out, "output file (stdout when omitted)");
    qext->callback([&] {
        action = [&]() -> int {
            Run run{"poset q-extend", field_name, {}};
            QCondition p = q_condition_from_json(run.load(condition_path));
            return run.emit(q_condition_to_json(q_extend_level(p, min_level)), out, p.spec());
        };
    });
    auto* qadd = poset->add_subcommand("q-add", "adjoin a fresh (label, beta) row");
    qadd->add_option("--condition", condition_path, "condition file")->required();
    qadd->add_option("--label", label, "row label (comma-free)")->required();
    qadd->add_option("--beta", beta, "row ordinal tag")->required();
    qadd->add_option("--out", out, "output file (stdout when omitted)");
    qadd->callback([&] {
        action = [&]() -> int {
            Run run{"poset q-add", field_name, {}};
            QCondition p = q_condition_from_json(run.load(condition_path));
            return run.emit(q_condition_to_json(q_add_pair(p, {label, beta})), out, p.spec());
        };
    });

    // ---- verify ----------------------------------------------------------
    auto* ver = app.add_subcommand("verify",
                                   "re-check witness, certificate, and transcript files");
    std::vector<std::string> witnesses, families, transcripts, conditions, artifacts;
    ver->add_option("--witness", witnesses, "witness files");
    ver->add_option("--family", families, "family files");
    ver->add_option("--transcript", transcripts, "transcript files");
    ver->add_option("--condition", conditions, "condition files");
    ver->add_option("--artifact", artifacts, "any artifact or manifest files");
    ver->add_option("--field", field_name, "field for formats that do not embed one");
    ver->callback([&] {
        action = [&]() -> int {
            std::vector<std::string> paths;
            for (const auto* set : {&witnesses, &families, &transcripts, &conditions,
                                    &artifacts})
                paths.insert(paths.end(), set->begin(), set->end());
            if (paths.empty())
                throw InvalidArgumentError("verify needs at least one file to check");
            return run_verify_paths(paths, FieldSpec::parse(field_name));
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return action();
    } catch (const InvalidArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
