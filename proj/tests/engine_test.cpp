#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fuzzyseek/engine.hpp"
#include "fuzzyseek/error.hpp"
#include "fuzzyseek/fixtures.hpp"
#include "fuzzyseek/image_io.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace fuzzyseek;
namespace fs = std::filesystem;

namespace {

const Palette& palette() {
    static const Palette p = Palette::standard();
    return p;
}

std::vector<fs::path> fixtures(const oracle::TempDir& dir, std::size_t count, std::uint64_t seed = 1) {
    FixtureOptions options;
    options.count = count;
    options.seed = seed;
    return write_fixtures(dir.path(), options, palette());
}

std::vector<ImageRecord> random_records(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<ImageRecord> records;
    for (ImageId id = 0; id < n; ++id) {
        records.emplace_back(id, "r" + std::to_string(id), oracle::random_signature(rng));
    }
    return records;
}

std::vector<ImageId> ids(const QueryResult& r) {
    std::vector<ImageId> out;
    for (const auto& x : r.ranked) out.push_back(x.image_id);
    return out;
}

}  // namespace

TEST(BuildParams, Validation) {
    BuildParams p;
    EXPECT_NO_THROW(p.validate());
    p.sig_len = 0;
    EXPECT_THROW(p.validate(), Error);
    p = {};
    p.dominance_threshold = 1.5;
    EXPECT_THROW(p.validate(), Error);
    p = {};
    p.tree.min_fill = 9;
    EXPECT_THROW(p.validate(), Error);
    EXPECT_EQ(BuildParams{}.shape(), (SignatureShape{16, 10}));
}

TEST(SignImage, SolidRedImage) {
    const Image img(4, 4, Rgb{255, 0, 0});
    const auto sig = sign_image(img, {});
    for (std::size_t j = 0; j < 16; ++j) {
        for (std::size_t i = 0; i < 10; ++i) {
            EXPECT_EQ(sig.block(j)[i], (j == 4 && i == 9) ? 1.0 : 0.0);
        }
    }
}

TEST(RetrievalBuild, SingleImage) {
    oracle::TempDir dir;
    const auto paths = fixtures(dir, 1);
    const auto index = RetrievalIndex::build(paths, {});
    EXPECT_EQ(index.tree().size(), 1u);
    EXPECT_EQ(index.tree().height(), 1u);
    const auto r = index.query_topk(paths[0], 5, BeamWidth(1));
    ASSERT_EQ(r.ranked.size(), 1u);
    EXPECT_EQ(r.ranked[0].image_id, 0u);
    EXPECT_EQ(r.ranked[0].distance.k_star, 0u);
}

TEST(RetrievalBuild, HundredFixturesAuditClean) {
    oracle::TempDir dir;
    const auto paths = fixtures(dir, 100);
    const auto index = RetrievalIndex::build(paths, {});
    EXPECT_EQ(index.tree().size(), 100u);
    EXPECT_TRUE(index.tree().audit().healthy());
    EXPECT_GT(index.stats().fhd_evaluations, 0u);
    EXPECT_TRUE(index.skipped().empty());
    for (std::size_t i = 0; i < index.records().size(); ++i) {
        EXPECT_EQ(index.records()[i].id, i);
        EXPECT_TRUE(fs::path(index.records()[i].path).is_absolute());
    }
}

TEST(RetrievalBuild, DuplicateFilesGetDistinctIds) {
    oracle::TempDir dir;
    const auto paths = fixtures(dir, 1);
    const std::vector<fs::path> twice{paths[0], paths[0], paths[0]};
    const auto index = RetrievalIndex::build(twice, {});
    EXPECT_EQ(index.tree().size(), 3u);
    const auto r = index.query_topk(paths[0], 3, BeamWidth(1));
    EXPECT_EQ(ids(r), (std::vector<ImageId>{0, 1, 2}));
}

TEST(RetrievalBuild, UndecodableImageIsSkipped) {
    oracle::TempDir dir;
    auto paths = fixtures(dir, 3);
    oracle::write_file(dir / "broken.ppm", "P6\n4 4\n255\nxx");
    paths.insert(paths.begin() + 1, dir / "broken.ppm");
    const auto index = RetrievalIndex::build(paths, {});
    EXPECT_EQ(index.tree().size(), 3u);
    ASSERT_EQ(index.skipped().size(), 1u);
    EXPECT_NE(index.skipped()[0].path.find("broken.ppm"), std::string::npos);
    EXPECT_FALSE(index.skipped()[0].reason.empty());
}

TEST(RetrievalBuild, NothingDecodableIsEmptyIndex) {
    oracle::TempDir dir;
    oracle::write_file(dir / "a.ppm", "garbage");
    const std::vector<fs::path> paths{dir / "a.ppm", dir / "missing.ppm"};
    try {
        RetrievalIndex::build(paths, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyIndex);
    }
}

TEST(RetrievalQuery, SelfRetrievalAtRankOne) {
    oracle::TempDir dir;
    const auto paths = fixtures(dir, 200, 3);
    const auto index = RetrievalIndex::build(paths, {});
    for (std::size_t i = 0; i < paths.size(); i += 13) {
        const auto r = index.query_topk(paths[i], 5, BeamWidth::unbounded());
        ASSERT_FALSE(r.ranked.empty());
        EXPECT_EQ(r.ranked[0].distance.k_star, 0u);
        // Identical images share the top distance; the id tie-break decides.
        const auto& self = index.records()[i].signature;
        EXPECT_EQ(index.find(r.ranked[0].image_id)->signature, self);
    }
}

TEST(RetrievalQuery, KLargerThanCorpus) {
    const auto index = RetrievalIndex::from_records(random_records(7, 1), {});
    const auto query = index.records()[3].signature;
    EXPECT_EQ(index.query_topk(query, 50, BeamWidth::unbounded()).ranked.size(), 7u);
    EXPECT_EQ(index.linear_scan_topk(query, 50).ranked.size(), 7u);
    EXPECT_THROW(index.query_topk(query, 0, BeamWidth(1)), Error);
}

TEST(RetrievalQuery, RedQueryPrefersRedImages) {
    std::vector<ImageRecord> records;
    BuildParams params;
    ImageId id = 0;
    for (int v = 0; v < 10; ++v) {
        const auto red = split_image(32, 8, {255, 0, 0}, {255, 0, 0}, 32);
        const auto blue = split_image(32, 8, {0, 0, 255}, {255, 255, 255}, 28 - v);
        records.emplace_back(id++, "red", sign_image(red, params));
        records.emplace_back(id++, "blue", sign_image(blue, params));
    }
    const auto index = RetrievalIndex::from_records(records, params);
    const auto query = sign_image(split_image(32, 8, {250, 5, 5}, {255, 0, 0}, 16), params);
    const auto r = index.linear_scan_topk(query, 10);
    for (const auto& x : r.ranked) EXPECT_EQ(x.path, "red");
}

TEST(RetrievalQuery, LinearScanEvaluatesEveryImage) {
    const auto index = RetrievalIndex::from_records(random_records(321, 2), {});
    const auto r = index.linear_scan_topk(index.records()[0].signature, 10);
    EXPECT_EQ(r.fhd_evaluations, 321u);
    EXPECT_EQ(r.candidates_examined, 321u);
}

TEST(RetrievalQuery, UnboundedBeamMatchesLinearScan) {
    const auto index = RetrievalIndex::from_records(random_records(500, 3), {});
    std::mt19937_64 rng(4);
    for (int q = 0; q < 25; ++q) {
        const auto query = oracle::random_signature(rng);
        const auto tree = index.query_topk(query, 10, BeamWidth::unbounded());
        const auto linear = index.linear_scan_topk(query, 10);
        EXPECT_EQ(tree.ranked, linear.ranked);
        EXPECT_EQ(recall(tree, linear), 1.0);
    }
}

TEST(RetrievalQuery, BeamOneExaminesFewerThanCorpus) {
    const auto index = RetrievalIndex::from_records(random_records(1000, 5), {});
    std::mt19937_64 rng(6);
    for (int q = 0; q < 20; ++q) {
        const auto r = index.query_topk(oracle::random_signature(rng), 10, BeamWidth(1));
        EXPECT_LT(r.fhd_evaluations, 1000u);
        EXPECT_FALSE(r.ranked.empty());
    }
}

TEST(RetrievalQuery, ShapeMismatchRejected) {
    const auto index = RetrievalIndex::from_records(random_records(5, 7), {});
    try {
        index.query_topk(FuzzySignature({16, 5}), 3, BeamWidth(1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(RankCandidates, TiesBrokenByAscendingId) {
    std::mt19937_64 rng(8);
    const auto sig = oracle::random_signature(rng);
    const auto w = weight_vector(sig);
    const std::string path = "p";
    std::vector<Candidate> cands{{9, &path, &w}, {2, &path, &w}, {5, &path, &w}};
    const auto ranked = rank_candidates(w, cands, 3, {});
    ASSERT_EQ(ranked.size(), 3u);
    EXPECT_EQ(ranked[0].image_id, 2u);
    EXPECT_EQ(ranked[1].image_id, 5u);
    EXPECT_EQ(ranked[2].image_id, 9u);
}

TEST(RankCandidates, OrderAgreesWithPairwiseCompare) {
    std::mt19937_64 rng(9);
    std::vector<WeightVector> weights;
    for (int i = 0; i < 200; ++i) weights.push_back(weight_vector(oracle::random_signature(rng)));
    const std::string path;
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < weights.size(); ++i) cands.push_back({i, &path, &weights[i]});
    const auto query = weight_vector(oracle::random_signature(rng));
    const auto ranked = rank_candidates(query, cands, 200, {});
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        const auto order = fhd_compare(ranked[i - 1].distance, ranked[i].distance);
        EXPECT_TRUE(order < 0 || (order == 0 && ranked[i - 1].image_id < ranked[i].image_id));
    }
}

TEST(Recall, Fractions) {
    QueryResult truth, found;
    for (ImageId id : {1, 2, 3, 4}) truth.ranked.push_back({id, "", {}});
    for (ImageId id : {2, 4, 9}) found.ranked.push_back({id, "", {}});
    EXPECT_DOUBLE_EQ(recall(found, truth), 0.5);
    EXPECT_DOUBLE_EQ(recall(truth, truth), 1.0);
}

TEST(RetrievalPersistence, SaveLoadGivesIdenticalQueries) {
    oracle::TempDir dir;
    const auto paths = fixtures(dir, 150, 11);
    BuildParams params;
    params.tree.fhd.alpha = 0.5;
    params.color_space = ColorSpace::Rgb;
    const auto index = RetrievalIndex::build(paths, params);
    index.save(dir / "idx.fst");
    EXPECT_TRUE(fs::exists(manifest_path_for(dir / "idx.fst")));

    const auto loaded = RetrievalIndex::load(dir / "idx.fst");
    EXPECT_EQ(loaded.params().color_space, ColorSpace::Rgb);
    EXPECT_EQ(loaded.params().tree, params.tree);
    EXPECT_TRUE(loaded.tree().audit().healthy());
    for (std::size_t i = 0; i < paths.size(); i += 15) {
        EXPECT_EQ(index.query_topk(paths[i], 10, BeamWidth(1)), loaded.query_topk(paths[i], 10, BeamWidth(1)));
        EXPECT_EQ(index.linear_scan_topk(paths[i], 10), loaded.linear_scan_topk(paths[i], 10));
    }
}

TEST(RetrievalPersistence, MismatchedManifestRejected) {
    oracle::TempDir dir;
    const auto index = RetrievalIndex::from_records(random_records(20, 12), {});
    index.save(dir / "idx.fst");
    auto records = random_records(20, 13);
    oracle::write_file(manifest_path_for(dir / "idx.fst"), encode_manifest(records));
    try {
        RetrievalIndex::load(dir / "idx.fst");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CorruptIndex);
    }
}

TEST(Manifest, RoundTrip) {
    const auto records = random_records(30, 14);
    const auto decoded = decode_manifest(encode_manifest(records), {16, 10});
    ASSERT_EQ(decoded.size(), records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        EXPECT_EQ(decoded[i].id, records[i].id);
        EXPECT_EQ(decoded[i].path, records[i].path);
        EXPECT_EQ(decoded[i].signature, records[i].signature);
    }
}

TEST(RetrievalDeterminism, SameInputsSameOutputs) {
    oracle::TempDir dir;
    const auto paths = fixtures(dir, 120, 15);
    const auto a = RetrievalIndex::build(paths, {});
    const auto b = RetrievalIndex::build(paths, {});
    EXPECT_EQ(a.stats().fhd_evaluations, b.stats().fhd_evaluations);
    EXPECT_EQ(a.tree().node_count(), b.tree().node_count());
    for (std::size_t i = 0; i < paths.size(); i += 10) {
        EXPECT_EQ(a.query_topk(paths[i], 10, BeamWidth(2)), b.query_topk(paths[i], 10, BeamWidth(2)));
    }
}

TEST(RetrievalCounters, ReportedCountsMatchGlobalCounter) {
    const auto index = RetrievalIndex::from_records(random_records(400, 16), {});
    std::mt19937_64 rng(17);
    for (int q = 0; q < 10; ++q) {
        const auto query = oracle::random_signature(rng);
        const auto before = fhd_counter::total();
        const auto r = index.query_topk(query, 10, BeamWidth(1));
        EXPECT_EQ(fhd_counter::total() - before, r.fhd_evaluations);
        const auto before_linear = fhd_counter::total();
        const auto l = index.linear_scan_topk(query, 10);
        EXPECT_EQ(fhd_counter::total() - before_linear, l.fhd_evaluations);
    }
}
