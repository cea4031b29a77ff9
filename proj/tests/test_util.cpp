#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "director/audio_io.hpp"
#include "director/image_io.hpp"
#include "director/rng.hpp"
#include "director/strings.hpp"

#include "support.hpp"

using namespace director;

TEST_CASE("string normalization") {
    CHECK(trim("  a b  ") == "a b");
    CHECK(to_lower("MiXeD") == "mixed");
    CHECK(collapse_whitespace("a\t\t b\n c ") == "a b c");
    CHECK(normalize_title("River Flows In You!") == "river flows in you");
    CHECK(normalize_title("  Clair---de   LUNE ") == "clair de lune");
}

TEST_CASE("tokenize_words splits on non-alphanumeric runs") {
    auto tokens = tokenize_words("Hello, world! It's 2 a.m.");
    std::vector<std::string> expected = {"hello", "world", "it", "s", "2", "a", "m"};
    CHECK(tokens == expected);
    CHECK(tokenize_words("...").empty());
}

TEST_CASE("levenshtein against hand-checked values") {
    CHECK(levenshtein("", "") == 0);
    CHECK(levenshtein("abc", "") == 3);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("flaw", "lawn") == 2);
    CHECK(normalized_levenshtein("abcd", "abcd") == doctest::Approx(0.0));
    CHECK(normalized_levenshtein("ab", "cdef") == doctest::Approx(1.0));
}

TEST_CASE("levenshtein agrees with a brute-force recursion on short strings") {
    std::function<std::size_t(std::string, std::string)> ref =
        [&](std::string a, std::string b) -> std::size_t {
        if (a.empty()) return b.size();
        if (b.empty()) return a.size();
        std::size_t cost = a.back() == b.back() ? 0 : 1;
        std::string a1 = a.substr(0, a.size() - 1);
        std::string b1 = b.substr(0, b.size() - 1);
        return std::min({ref(a1, b) + 1, ref(a, b1) + 1, ref(a1, b1) + cost});
    };
    Rng rng(42);
    for (int i = 0; i < 60; ++i) {
        std::string a, b;
        for (std::uint64_t j = rng.next_below(7); j > 0; --j)
            a.push_back(static_cast<char>('a' + rng.next_below(4)));
        for (std::uint64_t j = rng.next_below(7); j > 0; --j)
            b.push_back(static_cast<char>('a' + rng.next_below(4)));
        CHECK(levenshtein(a, b) == ref(a, b));
    }
}

TEST_CASE("base64 round trip") {
    Rng rng(7);
    for (int len = 0; len < 20; ++len) {
        std::vector<unsigned char> data;
        for (int i = 0; i < len; ++i)
            data.push_back(static_cast<unsigned char>(rng.next_below(256)));
        std::string encoded = base64_encode(data.data(), data.size());
        CHECK(base64_decode(encoded) == data);
    }
    CHECK(base64_encode(std::string("foobar")) == "Zm9vYmFy");
}

TEST_CASE("ppm round trip is byte exact") {
    testsupport::TempDir tmp("ppm");
    Frame f = testsupport::photo_frame(37, 23);
    write_ppm(tmp.path() / "x.ppm", f);
    Frame g = read_ppm(tmp.path() / "x.ppm");
    CHECK(f == g);
    auto [w, h] = read_ppm_dimensions(tmp.path() / "x.ppm");
    CHECK(w == 37);
    CHECK(h == 23);
}

TEST_CASE("ppm reader rejects truncated payloads") {
    testsupport::TempDir tmp("ppmtrunc");
    Frame f = testsupport::photo_frame(16, 16);
    write_ppm(tmp.path() / "x.ppm", f);
    auto size = std::filesystem::file_size(tmp.path() / "x.ppm");
    std::filesystem::resize_file(tmp.path() / "x.ppm", size - 64);
    CHECK_THROWS_AS(read_ppm(tmp.path() / "x.ppm"), Error);
}

TEST_CASE("wav round trip preserves samples") {
    testsupport::TempDir tmp("wav");
    AudioBuffer a = testsupport::click_track(1.0, 0.25, 8000);
    write_wav(tmp.path() / "x.wav", a);
    AudioBuffer b = read_wav(tmp.path() / "x.wav");
    CHECK(b.sample_rate == a.sample_rate);
    CHECK(b.channels == a.channels);
    CHECK(b.samples == a.samples);
}

TEST_CASE("wav reader skips unknown chunks") {
    testsupport::TempDir tmp("wavchunk");
    AudioBuffer a;
    a.sample_rate = 8000;
    a.channels = 2;
    a.samples = {1, -1, 2, -2, 3, -3};
    write_wav(tmp.path() / "x.wav", a);

    // Splice a LIST chunk between fmt and data.
    std::ifstream in(tmp.path() / "x.wav", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    in.close();
    std::string extra("LIST\x04\x00\x00\x00INFO", 12);
    bytes.insert(36, extra);
    std::uint32_t riff_size = static_cast<std::uint32_t>(bytes.size() - 8);
    for (int i = 0; i < 4; ++i)
        bytes[4 + i] = static_cast<char>((riff_size >> (8 * i)) & 0xFF);
    std::ofstream out(tmp.path() / "x.wav", std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();

    AudioBuffer b = read_wav(tmp.path() / "x.wav");
    CHECK(b.samples == a.samples);
    CHECK(b.channels == 2);
}

TEST_CASE("resample_linear preserves a constant signal") {
    std::vector<float> mono(1000, 0.5f);
    auto out = resample_linear(mono, 44100, 22050);
    CHECK(out.size() > 400);
    for (float v : out) CHECK(v == doctest::Approx(0.5f));
}

TEST_CASE("rng determinism and shuffle") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    std::vector<int> v1{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> v2 = v1;
    Rng r1(9), r2(9);
    r1.shuffle(v1);
    r2.shuffle(v2);
    CHECK(v1 == v2);
    std::sort(v1.begin(), v1.end());
    CHECK(v1 == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
}

TEST_CASE("frame resize and blend basics") {
    Frame f = testsupport::photo_frame(64, 48);
    CHECK(resize_bilinear(f, 64, 48) == f);

    Frame black = make_solid(8, 8, 0, 0, 0);
    Frame white = make_solid(8, 8, 255, 255, 255);
    Frame mid = blend(black, white, 0.5);
    for (auto px : mid.pixels) CHECK((px == 127 || px == 128));
}
