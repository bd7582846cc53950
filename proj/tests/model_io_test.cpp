#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cseer/model_io.hpp"
#include "cseer/synthetic.hpp"

using namespace cseer;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cseer_io_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_bytes(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Vocabulary test_vocab() {
    Vocabulary vocab;
    vocab.courses = {make_course("Alpha", 10), make_course("Alpha", 120),
                     make_course("Beta", 55)};
    vocab.majors = {"Alpha", "Beta"};
    vocab.letter_categories = binary_letter_categories();
    vocab.rebuild_lookup();
    return vocab;
}

}  // namespace

TEST_CASE("save then load round-trips parameters and vocabulary bit-exactly") {
    TempDir tmp;
    auto vocab = test_vocab();
    for (int kind_int = 1; kind_int <= 3; ++kind_int) {
        ModelKind kind = model_kind_from_int(kind_int);
        ModelDims dims{vocab.n(), vocab.m(), vocab.k(), 5,
                       kind == ModelKind::CoEnrollmentMajors ? 4 : 0};
        Model model = init_model(kind, dims, Threshold::for_goal(Threshold::Goal::A), 17);

        fs::path file = tmp.path / ("model" + std::to_string(kind_int) + ".bin");
        save_model(model, vocab, file.string());
        auto loaded = load_model(file.string());

        CHECK(loaded.model.kind == kind);
        CHECK(loaded.model.threshold == model.threshold);
        CHECK(loaded.vocab.courses == vocab.courses);
        CHECK(loaded.vocab.majors == vocab.majors);
        CHECK(loaded.vocab.letter_categories == vocab.letter_categories);
        CHECK(loaded.vocab.course_index("Beta", 55) == vocab.course_index("Beta", 55));

        auto a = param_blocks(model);
        auto b = param_blocks(loaded.model);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            REQUIRE(a[i].size == b[i].size);
            for (std::ptrdiff_t j = 0; j < a[i].size; ++j)
                CHECK(a[i].data[j] == b[i].data[j]);
        }

        // saving the loaded model reproduces the file byte for byte
        fs::path second = tmp.path / "again.bin";
        save_model(loaded.model, loaded.vocab, second.string());
        CHECK(read_bytes(file) == read_bytes(second));
        CHECK_FALSE(fs::exists(tmp.path / "again.bin.tmp"));
    }
}

TEST_CASE("loaded models predict exactly like the originals") {
    TempDir tmp;
    auto vocab = test_vocab();
    ModelDims dims{vocab.n(), vocab.m(), vocab.k(), 6, 0};
    Model model = init_model(ModelKind::CoEnrollment, dims, Threshold::for_goal(Threshold::Goal::B), 23);
    fs::path file = tmp.path / "model.bin";
    save_model(model, vocab, file.string());
    auto loaded = load_model(file.string());

    std::mt19937_64 rng(29);
    for (int i = 0; i < 100; ++i) {
        auto seq = random_encoded_sequence(dims, 1 + static_cast<int>(rng() % 4), rng);
        auto original = forward_sequence(model, seq);
        auto reloaded = forward_sequence(loaded.model, seq);
        REQUIRE(original.size() == reloaded.size());
        for (std::size_t t = 0; t < original.size(); ++t)
            CHECK((original[t] - reloaded[t]).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("malformed files are rejected with distinct errors") {
    TempDir tmp;
    auto vocab = test_vocab();
    ModelDims dims{vocab.n(), vocab.m(), vocab.k(), 4, 0};
    Model model = init_model(ModelKind::CoEnrollment, dims, Threshold::for_goal(Threshold::Goal::B), 31);
    fs::path file = tmp.path / "model.bin";
    save_model(model, vocab, file.string());
    std::string bytes = read_bytes(file);

    SUBCASE("bad magic") {
        std::string corrupt = bytes;
        corrupt[0] = 'X';
        write_bytes(tmp.path / "bad.bin", corrupt);
        CHECK_THROWS_WITH(load_model((tmp.path / "bad.bin").string()),
                          doctest::Contains("bad magic"));
    }
    SUBCASE("unsupported version") {
        std::string corrupt = bytes;
        corrupt[5] = 9;  // version u32 follows the 5-byte magic
        write_bytes(tmp.path / "bad.bin", corrupt);
        CHECK_THROWS_WITH(load_model((tmp.path / "bad.bin").string()),
                          doctest::Contains("version"));
    }
    SUBCASE("dim overflow") {
        std::string corrupt = bytes;
        // n is the u32 at offset 22 (magic 5, version 4, kind 4, goal 1, cut 8)
        corrupt[22] = '\xff';
        corrupt[23] = '\xff';
        corrupt[24] = '\xff';
        corrupt[25] = '\xff';
        write_bytes(tmp.path / "bad.bin", corrupt);
        CHECK_THROWS_WITH(load_model((tmp.path / "bad.bin").string()),
                          doctest::Contains("dim overflow"));
    }
    SUBCASE("truncated file") {
        write_bytes(tmp.path / "bad.bin", bytes.substr(0, bytes.size() - 11));
        CHECK_THROWS_WITH(load_model((tmp.path / "bad.bin").string()),
                          doctest::Contains("truncated"));
    }
    SUBCASE("trailing bytes") {
        write_bytes(tmp.path / "bad.bin", bytes + "zz");
        CHECK_THROWS_WITH(load_model((tmp.path / "bad.bin").string()),
                          doctest::Contains("trailing"));
    }
    SUBCASE("missing file") {
        CHECK_THROWS_WITH(load_model((tmp.path / "nope.bin").string()),
                          doctest::Contains("cannot open"));
    }
}
