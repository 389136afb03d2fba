#pragma once

// Independent re-verification of artifact files.  Given any JSON document
// this library emits — witness, deep-intersection certificate, game
// transcript, family, poset condition, basis, vector, preset, certificate,
// or run manifest — the dispatcher recognizes the artifact, re-runs every
// check the file claims, and reports the first failure.
//
// Two failure modes are kept distinct: a document that does not parse
// against its schema throws InvalidArgumentError (malformed input), while a
// well-formed document whose claims fail to re-check yields a report with
// ok = false and the failing check in `detail` (verification failure).

#include <filesystem>
#include <string>
#include <utility>

#include <madvec/json_io.hpp>

namespace madvec {

struct VerifyReport {
    std::string type;    // recognized artifact type
    bool ok = false;
    std::string detail;  // summary when ok, the failing check when not
};

namespace verifydetail {

/// Runs the semantic re-check phase, converting any library error into a
/// failed report.  Parse errors must be raised before calling this.
template <typename Check>
VerifyReport checked(std::string type, Check&& check) {
    VerifyReport report;
    report.type = std::move(type);
    try {
        report.detail = check();
        report.ok = true;
    } catch (const Error& e) {
        report.ok = false;
        report.detail = e.what();
    }
    return report;
}

}  // namespace verifydetail

/// Recognizes and re-checks one artifact document.  `default_field` supplies
/// the field for formats that do not embed one (bases, vectors, presets);
/// every other format names its own field.
inline VerifyReport verify_artifact(const Json& doc,
                                    FieldSpec default_field = FieldSpec::prime(2)) {
    using verifydetail::checked;
    if (doc.is_array()) {
        // A bare array is the interchange form of a block sequence.
        FinBlockSeq s = blockseq_from_json(doc);
        return checked("block-sequence", [&] {
            return "block sequence of length " + std::to_string(s.size()) +
                   " is strictly ordered";
        });
    }
    if (!doc.is_object())
        throw InvalidArgumentError("artifact must be a JSON object or a block-sequence array");

    if (doc.contains("type")) {
        std::string type = jsondetail::require_string(doc["type"], "artifact type");
        if (type == "witness-nonmax") {
            LoadedWitness loaded = witness_from_json(doc);
            return checked(type, [&] {
                loaded.family.verify_certs();
                verify_nonmax_witness(loaded.family, loaded.witness);
                return "all " + std::to_string(loaded.witness.checks.size()) +
                       " member checks re-verified for a " +
                       std::to_string(loaded.witness.xs.size()) + "-vector witness";
            });
        }
        if (type == "h-certificate") {
            LoadedHCertificate loaded = h_certificate_from_json(doc);
            return checked(type, [&] {
                loaded.family.verify_certs();
                verify_h_certificate(loaded.family, loaded.xs, loaded.cert);
                return "evidence for " + std::to_string(loaded.cert.members.size()) +
                       " members re-verified at depth " + std::to_string(loaded.cert.depth);
            });
        }
        if (type == "game-transcript") {
            GameTranscript t = transcript_from_json(doc);
            return checked(type, [&] {
                validate_transcript(t);
                return std::string(game_kind_name(t.kind())) + " transcript replayed: " +
                       std::to_string(t.rounds().size()) + " rounds legal";
            });
        }
        if (type == "map-condition") {
            MAPCondition p = map_condition_from_json(doc);
            return checked(type, [&] {
                return "condition with a " + std::to_string(p.s().size()) +
                       "-vector core and " + std::to_string(p.F().size()) +
                       " listed members is well-formed";
            });
        }
        if (type == "diagonal-run") {
            LoadedDiagonalRun loaded = diagonal_run_from_json(doc);
            return checked(type, [&] {
                loaded.family.verify_certs();
                DiagonalizeResult replay =
                    diagonalize_under(loaded.family, dominating_h(loaded.family), loaded.len);
                if (replay.xs != loaded.result.xs ||
                    replay.h_used != loaded.result.h_used)
                    throw CertificateError(
                        "diagonal run does not replay: the canonical construction for this "
                        "family and length yields different picks");
                if (replay.cases.size() != loaded.result.cases.size())
                    throw CertificateError("diagonal run records a different case count");
                for (std::size_t i = 0; i < replay.cases.size(); ++i)
                    if (replay.cases[i].member != loaded.result.cases[i].member ||
                        replay.cases[i].hits != loaded.result.cases[i].hits)
                        throw CertificateError("diagonal run case for member " +
                                               std::to_string(loaded.result.cases[i].member) +
                                               " does not replay");
                return "replayed the " + std::to_string(loaded.len) +
                       "-step construction; every pick and case matches";
            });
        }
        if (type == "run-manifest")
            throw InvalidArgumentError(
                "manifests verify against their neighbouring files; pass the manifest path "
                "to verify_file");
        throw InvalidArgumentError("unknown artifact type: \"" + type + "\"");
    }

    if (doc.contains("members") && doc.contains("certs")) {
        ADFamily fam = family_from_json(doc);
        return checked("family", [&] {
            fam.verify_certs();
            return "all " + std::to_string(fam.certs().size()) +
                   " certificates re-verified for " + std::to_string(fam.size()) + " members";
        });
    }
    if (doc.contains("rows") && doc.contains("n") && doc.contains("F")) {
        QCondition p = q_condition_from_json(doc);
        return checked("q-condition", [&] {
            return "table condition with " + std::to_string(p.table().size()) +
                   " rows of length " + std::to_string(p.height()) + " is well-formed";
        });
    }
    if (doc.contains("basis")) {
        // The rows themselves form the claim: re-check the reduced shape.
        std::vector<SparseVector> rows = vector_list_from_json(
            default_field, jsondetail::require_key(doc, "basis", "basis"), "basis rows");
        return checked("basis", [&] {
            EchelonBasis b = EchelonBasis::from_rows(default_field, rows);
            return "reduced basis of dimension " + std::to_string(b.dim());
        });
    }
    if (doc.contains("v")) {
        SparseVector x = vector_from_json(default_field, doc);
        return checked("vector", [&] {
            return "canonical vector with " + std::to_string(x.entries().size()) + " entries";
        });
    }
    if (doc.contains("kind")) {
        Preset p = preset_from_json(doc);
        return checked("preset", [&] {
            SubspaceStream probe(p, default_field);
            probe.prefix(4);
            return "preset of kind '" + p.kind_name() +
                   "' streams a valid reduced presentation";
        });
    }
    if (doc.contains("blocks")) {
        // Enumeration reports: a strictly ascending list of blocks.
        std::vector<FinBlock> blocks;
        for (const Json& b :
             jsondetail::require_array(jsondetail::require_key(doc, "blocks", "block list"),
                                       "block list"))
            blocks.push_back(block_from_json(b));
        return checked("block-list", [&] {
            for (std::size_t i = 0; i + 1 < blocks.size(); ++i)
                if (!(blocks[i] < blocks[i + 1]))
                    throw CertificateError("block list is not strictly ascending at entry " +
                                           std::to_string(i + 1));
            return "list of " + std::to_string(blocks.size()) + " blocks is strictly ordered";
        });
    }
    if (doc.contains("vectors")) {
        std::vector<SparseVector> xs = vector_list_from_json(
            default_field, jsondetail::require_key(doc, "vectors", "vector list"),
            "vector list");
        return checked("vector-list", [&] {
            return "list of " + std::to_string(xs.size()) + " canonical vectors";
        });
    }
    if (doc.contains("M")) {
        std::size_t m = jsondetail::require_index(jsondetail::require_key(doc, "M", "bound"),
                                                  "bound M");
        return checked("bound", [&] { return "bound M = " + std::to_string(m); });
    }
    if (doc.contains("pair")) {
        ADCertificate c = cert_from_json(doc);
        return checked("certificate", [&] {
            return "certificate for pair (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                   ") is structurally consistent; embed it in a family file to recompute it";
        });
    }
    throw InvalidArgumentError("unrecognized artifact shape");
}

/// File-level entry point.  Run manifests are resolved here because their
/// digest claims refer to sibling files by relative path.
inline VerifyReport verify_file(const std::string& path,
                                FieldSpec default_field = FieldSpec::prime(2)) {
    Json doc = load_json_file(path);
    if (doc.is_object() && doc.contains("type") && doc["type"].is_string() &&
        doc["type"].get<std::string>() == "run-manifest") {
        RunManifest m = manifest_from_json(doc);
        return verifydetail::checked("run-manifest", [&] {
            std::filesystem::path base = std::filesystem::path(path).parent_path();
            auto recheck = [&](const std::vector<ManifestEntry>& entries, const char* which) {
                for (const auto& e : entries) {
                    std::string target = (base / e.path).string();
                    std::string digest;
                    try {
                        digest = digest_hex(read_file_bytes(target));
                    } catch (const Error&) {
                        throw CertificateError(std::string(which) + " file " + e.path +
                                               " named in the manifest cannot be read");
                    }
                    if (digest != e.digest)
                        throw CertificateError(std::string(which) + " file " + e.path +
                                               " has digest " + digest +
                                               ", manifest records " + e.digest);
                }
            };
            recheck(m.inputs, "input");
            recheck(m.outputs, "output");
            return "all " + std::to_string(m.inputs.size() + m.outputs.size()) +
                   " digests recomputed and matched";
        });
    }
    return verify_artifact(doc, default_field);
}

}  // namespace madvec
