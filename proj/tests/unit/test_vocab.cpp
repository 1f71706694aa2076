#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lvc/errors.hpp"
#include "lvc/vocab.hpp"

using namespace lvc;

namespace {

std::vector<std::vector<std::string>> corpus_aba() { return {{"a", "b", "a"}}; }

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
    const auto p = std::filesystem::temp_directory_path() / ("lvc_vocab_" + name);
    std::ofstream(p) << body;
    return p;
}

EmbeddingTable glove_from(const std::string& text, std::size_t dim, const Vocabulary& v) {
    std::istringstream in(text);
    Rng rng(1);
    return load_glove_text(in, "mem", dim, v, rng);
}

}  // namespace

TEST(Vocabulary, OrderingRule) {
    const auto v = Vocabulary::build(corpus_aba(), 1);
    ASSERT_EQ(v.size(), 4u);
    EXPECT_EQ(v.id("<pad>"), 0u);
    EXPECT_EQ(v.id("<unk>"), 1u);
    EXPECT_EQ(v.id("a"), 2u);
    EXPECT_EQ(v.id("b"), 3u);
}

TEST(Vocabulary, MinFreq) {
    const auto v = Vocabulary::build(corpus_aba(), 2);
    EXPECT_EQ(v.size(), 3u);
    EXPECT_TRUE(v.find("a"));
    EXPECT_FALSE(v.find("b"));
    EXPECT_THROW(Vocabulary::build(corpus_aba(), 0), ConfigError);
}

TEST(Vocabulary, TiesAreLexicographic) {
    const std::vector<std::vector<std::string>> c{{"zeta", "alpha", "mid", "mid"}};
    const auto v = Vocabulary::build(c, 1);
    EXPECT_EQ(v.token(2), "mid");
    EXPECT_EQ(v.token(3), "alpha");
    EXPECT_EQ(v.token(4), "zeta");
}

TEST(Vocabulary, EmptyCorpusIsSpecialsOnly) {
    const auto v = Vocabulary::build(std::vector<std::vector<std::string>>{}, 1);
    EXPECT_EQ(v.size(), 2u);
}

TEST(Vocabulary, UnknownMapsToUnk) {
    const auto v = Vocabulary::build(corpus_aba(), 1);
    const std::vector<std::string> toks{"a", "zzz"};
    EXPECT_EQ(v.encode(toks), (std::vector<TokenId>{2, Vocabulary::unk_id}));
}

TEST(Vocabulary, Bijection) {
    const auto v = Vocabulary::build(std::vector<std::vector<std::string>>{{"x", "y", "z", "x"}}, 1);
    for (TokenId i = 0; i < v.size(); ++i) EXPECT_EQ(v.id(v.token(i)), i);
    const auto restored = Vocabulary::from_tokens(v.tokens());
    EXPECT_EQ(restored.tokens(), v.tokens());
    EXPECT_THROW(Vocabulary::from_tokens({"<pad>", "<unk>", "x", "x"}), DataError);
}

TEST(Glove, ReadsMatchedRowsAsFrozen) {
    const auto v = Vocabulary::from_tokens({"<pad>", "<unk>", "hello", "other"});
    const auto t = glove_from("hello 0.1 0.2\n", 2, v);
    EXPECT_EQ(t.matrix.at(2, 0), 0.1);
    EXPECT_EQ(t.matrix.at(2, 1), 0.2);
    EXPECT_TRUE(t.frozen[2]);
    EXPECT_EQ(t.matched, 1u);
    EXPECT_FALSE(t.frozen[3]);
    for (std::size_t c = 0; c < 2; ++c) {
        EXPECT_GT(t.matrix.at(3, c), -0.1);
        EXPECT_LT(t.matrix.at(3, c), 0.1);
        EXPECT_EQ(t.matrix.at(0, c), 0.0);
    }
}

TEST(Glove, MalformedLineCitesLineNumber) {
    const auto v = Vocabulary::from_tokens({"<pad>", "<unk>", "hello"});
    try {
        glove_from("hello 0.1\n", 2, v);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
    }
    try {
        glove_from("a 1 2\nb 1 2\nhello 0.1\n", 2, v);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(glove_from("hello 0.1 x\n", 2, v), ParseError);
}

TEST(Glove, ConsistentWrongDimensionIsConfigError) {
    const auto v = Vocabulary::from_tokens({"<pad>", "<unk>", "hello"});
    EXPECT_THROW(glove_from("hello 1 2 3\nworld 4 5 6\n", 2, v), ConfigError);
}

TEST(Glove, FromFile) {
    const auto v = Vocabulary::from_tokens({"<pad>", "<unk>", "hello"});
    const auto p = temp_file("glove.txt", "hello 0.5 -0.5\n");
    Rng rng(2);
    const auto t = load_glove_text(p, 2, v, rng);
    EXPECT_EQ(t.matrix.at(2, 1), -0.5);
    EXPECT_THROW(load_glove_text("/nonexistent/glove.txt", 2, v, rng), DataError);
}

TEST(Embeddings, MaskClearsFrozenAndPad) {
    const auto v = Vocabulary::from_tokens({"<pad>", "<unk>", "hello", "other"});
    auto t = glove_from("hello 0.1 0.2\n", 2, v);
    for (auto& g : t.matrix.grad()) g = 1.0;
    t.mask_gradients();
    EXPECT_EQ(t.matrix.grad()[0], 0.0);  // pad
    EXPECT_EQ(t.matrix.grad()[4], 0.0);  // hello
    EXPECT_EQ(t.matrix.grad()[2], 1.0);  // unk
    EXPECT_EQ(t.matrix.grad()[6], 1.0);  // other
}

TEST(Embeddings, SequenceShapesAndValues) {
    Rng rng(3);
    const auto t = EmbeddingTable::random(5, 2, rng);
    const std::vector<TokenId> ids{3, 4};
    {
        ad::Tape tape;
        const auto x = embed_sequence(tape, ids, t, AuxSequenceFeatures{}, "i");
        EXPECT_EQ(x.shape(), (ad::Shape{2, 2}));
        EXPECT_EQ(x.at(1, 0), t.matrix.at(4, 0));
    }
    AuxSequenceFeatures aux(1);
    aux.add_row("i", 0, {0.0});
    aux.add_row("i", 1, {0.0});
    ad::Tape tape;
    const auto x = embed_sequence(tape, ids, t, aux, "i");
    EXPECT_EQ(x.shape(), (ad::Shape{2, 3}));
    EXPECT_EQ(x.at(0, 0), t.matrix.at(3, 0));
    EXPECT_EQ(x.at(0, 2), 0.0);
    // Absent instance gets zeros; single token still rank 2.
    const std::vector<TokenId> one{2};
    const auto y = embed_sequence(tape, one, t, aux, "missing");
    EXPECT_EQ(y.shape(), (ad::Shape{1, 3}));
    EXPECT_EQ(y.at(0, 2), 0.0);
}

TEST(Embeddings, AuxRowMismatchNamesInstance) {
    Rng rng(3);
    const auto t = EmbeddingTable::random(5, 2, rng);
    AuxSequenceFeatures aux(1);
    aux.add_row("inst7", 0, {1.0});
    const std::vector<TokenId> ids{2, 3};
    ad::Tape tape;
    try {
        embed_sequence(tape, ids, t, aux, "inst7");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("inst7"), std::string::npos);
    }
}

TEST(AuxFeatures, LoadersAndDimensionChecks) {
    const auto seq = temp_file("seq.tsv", "a\t0\t1 2\na\t1\t3 4\nb\t0\t5 6\n");
    const auto s = load_aux_sequence_features(seq);
    EXPECT_EQ(s.dim(), 2u);
    EXPECT_EQ(s.count(), 2u);
    EXPECT_EQ(s.get("a", 2).at(1, 1), 4.0);

    const auto inst = temp_file("inst.tsv", "a\t0.5 0.25 1\nb\t1 1 1\n");
    const auto f = load_aux_instance_features(inst);
    EXPECT_EQ(f.dim(), 3u);
    EXPECT_EQ(f.get("a").at(0, 1), 0.25);
    EXPECT_EQ(f.get("zzz").at(0, 2), 0.0);

    EXPECT_TRUE(std::holds_alternative<AuxSequenceFeatures>(load_aux_features(seq)));
    EXPECT_TRUE(std::holds_alternative<AuxInstanceFeature>(load_aux_features(inst)));

    const auto bad = temp_file("bad.tsv", "a\t1 2\nb\t1 2 3\n");
    try {
        load_aux_instance_features(bad);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("b"), std::string::npos);
    }
    EXPECT_THROW(load_aux_instance_features(temp_file("dup.tsv", "a\t1\na\t2\n")), DataError);
    EXPECT_THROW(load_aux_sequence_features(temp_file("gap.tsv", "a\t0\t1\na\t2\t1\n")), DataError);
}
