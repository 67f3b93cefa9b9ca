#include <doctest.h>

#include <set>

#include "latentwire/codec.hpp"
#include "latentwire/data/container.hpp"
#include "latentwire/data/preprocess.hpp"
#include "latentwire/data/records.hpp"
#include "latentwire/data/schema.hpp"
#include "latentwire/data/split.hpp"
#include "latentwire/data/synth.hpp"
#include "latentwire/errors.hpp"
#include "test_util.hpp"

using namespace latentwire;
using namespace latentwire::data;

namespace {

DatasetSchema tiny_schema() {
    DatasetSchema s;
    s.name = "tiny";
    s.columns = {{"x", ColumnKind::numeric}, {"proto", ColumnKind::categorical}, {"label", ColumnKind::label}};
    s.attack_label_values = {"bad"};
    s.normal_label_values = {"ok"};
    return s;
}

std::vector<FeatureVector> labeled(std::size_t n0, std::size_t n1) {
    std::vector<FeatureVector> v;
    for (std::size_t i = 0; i < n0 + n1; ++i) v.push_back({{static_cast<float>(i)}, static_cast<std::uint8_t>(i >= n0), i});
    return v;
}

std::string partition_key(const Splits& s) {
    std::string key;
    for (const auto* part : {&s.train, &s.validation, &s.test}) {
        for (const auto& r : *part) key += std::to_string(r.record_id) + ",";
        key += "|";
    }
    return to_hex(sha256(key));
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("csv splitting handles quotes and line endings") {
    auto rows = parse_csv("a,\"b,c\",\"d\"\"e\"\r\n1,2,3\n\"multi\nline\",x,y");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
    CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});
    CHECK(rows[2][0] == "multi\nline");
}

TEST_CASE("three NSL-KDD rows load as 42-value records") {
    auto csv = synth_nsl_kdd_csv({3, 5, 0.5, 0.0, false});
    auto records = parse_records(csv, nsl_kdd_schema());
    REQUIRE(records.size() == 3);
    for (const auto& r : records) CHECK(r.values.size() == 42);
}

TEST_CASE("arity mismatch reports the row") {
    const auto schema = nsl_kdd_schema();
    auto csv = synth_nsl_kdd_csv({3, 5, 0.5, 0.0, false});
    auto rows = parse_csv(csv);
    // Drop the last field of the second row.
    std::string bad;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto fields = rows[r];
        if (r == 1) fields.pop_back();
        for (std::size_t i = 0; i < fields.size(); ++i) bad += (i ? "," : "") + fields[i];
        bad += "\n";
    }
    try {
        parse_records(bad, schema);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 1);
    }
}

TEST_CASE("unknown label value is named in the error") {
    auto schema = tiny_schema();
    try {
        auto recs = parse_records("1,tcp,weird\n", schema);
        (void)fit_preprocessor(recs, schema);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("weird") != std::string::npos);
    }
}

TEST_CASE("UNSW-NB15 head rows keep their 0/1 label strings") {
    const auto schema = load_schema(lwtest::source_dir() / "schemas" / "unsw_nb15.json");
    auto records = load_csv(lwtest::source_dir() / "tests" / "fixtures" / "unsw_nb15_head.csv", schema);
    REQUIRE(records.size() == 10);
    const std::size_t label = schema.label_index();
    const std::vector<std::string> expected{"0", "0", "0", "0", "0", "0", "1", "1", "1", "1"};
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(records[i].values.size() == 45);
        CHECK(records[i].values[label] == expected[i]);
    }
    CHECK(records[0].values[2] == "udp");
    CHECK(records[6].values[43] == "Exploits");
}

TEST_CASE("schema validation") {
    auto s = tiny_schema();
    CHECK_NOTHROW(s.validate());
    s.columns.push_back({"label2", ColumnKind::label});
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = tiny_schema();
    s.normal_label_values.insert("bad");
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK(schema_from_json(schema_to_json(tiny_schema())).columns.size() == 3);
}

TEST_CASE("min-max fit and transform") {
    auto schema = tiny_schema();
    auto recs = parse_records("2,tcp,ok\n4,udp,bad\n6,tcp,ok\n", schema);
    auto model = fit_preprocessor(recs, schema);
    REQUIRE(model.numeric().size() == 1);
    CHECK(model.numeric()[0].min == 2.0);
    CHECK(model.numeric()[0].max == 6.0);
    REQUIRE(model.categorical().size() == 1);
    CHECK(model.categorical()[0].categories == std::vector<std::string>{"tcp", "udp"});
    CHECK(model.output_dimension() == 3);

    auto probe = parse_records("4,sctp,ok\n8,udp,bad\n", schema);
    auto fv = transform(probe, model, schema);
    REQUIRE(fv.size() == 2);
    CHECK(fv[0].features == std::vector<float>{0.5f, 0.0f, 0.0f});
    CHECK(fv[0].label == 0);
    CHECK(fv[0].record_id == 0);
    CHECK(fv[1].features == std::vector<float>{1.0f, 0.0f, 1.0f});
    CHECK(fv[1].label == 1);
    CHECK(fv[1].record_id == 1);
}

TEST_CASE("constant column maps to zero") {
    auto schema = tiny_schema();
    auto recs = parse_records("3,tcp,ok\n3,tcp,bad\n", schema);
    auto fv = transform(recs, fit_preprocessor(recs, schema), schema);
    CHECK(fv[0].features[0] == 0.0f);
    CHECK(fv[1].features[0] == 0.0f);
}

TEST_CASE("non-numeric token carries row and column") {
    auto schema = tiny_schema();
    auto recs = parse_records("2,tcp,ok\nabc,udp,bad\n", schema);
    try {
        (void)fit_preprocessor(recs, schema);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 1);
        CHECK(e.column() == 0);
    }
    CHECK_THROWS_AS(parse_numeric("inf", 0, 0), ParseError);
}

TEST_CASE("protocol_type vocabulary on the bundled sample") {
    const auto schema = load_schema(lwtest::source_dir() / "schemas" / "nsl_kdd.json");
    const auto path = lwtest::source_dir() / "data" / "nsl_kdd_sample.csv";
    // Independent count: distinct second fields of the raw file.
    std::set<std::string> distinct;
    for (const auto& row : parse_csv(lwtest::read_text(path))) distinct.insert(row.at(1));
    CHECK(distinct == std::set<std::string>{"icmp", "tcp", "udp"});

    auto model = fit_preprocessor(load_csv(path, schema), schema);
    const CategoryVocabulary* proto = nullptr;
    for (const auto& c : model.categorical())
        if (c.name == "protocol_type") proto = &c;
    REQUIRE(proto);
    CHECK(proto->categories == std::vector<std::string>{"icmp", "tcp", "udp"});
}

TEST_CASE("preprocess model round-trips with a stable fingerprint") {
    auto schema = tiny_schema();
    auto model = fit_preprocessor(parse_records("2,tcp,ok\n4,udp,bad\n", schema), schema);
    lwtest::TempDir dir("pre");
    model.save(dir / "p.json");
    auto back = PreprocessModel::load(dir / "p.json");
    CHECK(back.canonical() == model.canonical());
    CHECK(back.fingerprint() == model.fingerprint());
    auto other = fit_preprocessor(parse_records("2,tcp,ok\n5,udp,bad\n", schema), schema);
    CHECK(other.fingerprint() != model.fingerprint());
}

TEST_CASE("stratified split sizes") {
    auto v = labeled(5, 5);
    SplitSpec spec;
    spec.train_fraction = 0.8;
    spec.validation_fraction = 0.1;
    spec.seed = 3;
    auto s = split(v, spec);
    REQUIRE(s.train.size() == 8);
    std::size_t attacks = 0;
    for (const auto& r : s.train) attacks += r.label;
    CHECK(attacks == 4);
    CHECK(s.validation.size() + s.test.size() == 2);
}

TEST_CASE("split determinism and seed sensitivity") {
    auto v = labeled(500, 500);
    SplitSpec a;
    a.seed = 11;
    SplitSpec b = a;
    b.seed = 12;
    auto s1 = split(v, a), s2 = split(v, a), s3 = split(v, b);
    CHECK(partition_key(s1) == partition_key(s2));
    CHECK(partition_key(s1) != partition_key(s3));
    CHECK(s1.train.size() == s3.train.size());
    CHECK(s1.validation.size() == s3.validation.size());
    CHECK(s1.test.size() == s3.test.size());
}

TEST_CASE("stratified split needs both classes") {
    auto v = labeled(10, 0);
    CHECK_THROWS_AS(split(v, SplitSpec{}), Error);
}

TEST_CASE("split without test carve") {
    auto v = labeled(50, 50);
    SplitSpec spec;
    spec.carve_test = false;
    spec.validation_fraction = 0.2;
    auto s = split(v, spec);
    CHECK(s.train.size() == 80);
    CHECK(s.validation.size() == 20);
    CHECK(s.test.empty());
}

TEST_CASE("stratified subset keeps proportions and order") {
    std::vector<std::uint8_t> labels;
    for (int i = 0; i < 1000; ++i) labels.push_back(i % 4 == 0);
    auto idx = stratified_indices(labels, 100, 9);
    REQUIRE(idx.size() == 100);
    std::size_t ones = 0;
    for (auto i : idx) ones += labels[i];
    CHECK(ones == 25);
    CHECK(std::is_sorted(idx.begin(), idx.end()));
}

TEST_CASE("container round trip and size") {
    auto v = lwtest::random_vectors(17, 5, 1);
    auto bytes = encode_container(v, 5);
    CHECK(bytes.size() == container_bytes(17, 5));
    auto back = decode_container(bytes);
    CHECK(back.dimension == 5);
    REQUIRE(back.records.size() == 17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(back.records[i].features == v[i].features);
        CHECK(back.records[i].label == v[i].label);
        CHECK(back.records[i].record_id == v[i].record_id);
    }
    bytes.pop_back();
    CHECK_THROWS_AS(decode_container(bytes), LoadError);
}

TEST_CASE("synthetic generator is seeded") {
    SynthOptions o;
    o.rows = 50;
    CHECK(synth_nsl_kdd_csv(o) == synth_nsl_kdd_csv(o));
    auto o2 = o;
    o2.seed = 2;
    CHECK(synth_nsl_kdd_csv(o) != synth_nsl_kdd_csv(o2));
    o.difficulty_column = true;
    auto recs = parse_records(synth_nsl_kdd_csv(o), nsl_kdd_schema(true));
    CHECK(recs.front().values.size() == 43);
}

}  // TEST_SUITE
