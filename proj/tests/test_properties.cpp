#include "properties.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace ctpath::testing;

namespace {

constexpr int kCases = 1000;

void require_clean(const PropertyResult& r)
{
    INFO(r.first);
    CHECK(r.cases >= kCases);
    CHECK(r.violations == 0);
}

}  // namespace

TEST_CASE("decile partition and anchor") { require_clean(decile_property(kCases, 101)); }

TEST_CASE("engagement bounds") { require_clean(engagement_property(kCases, 202)); }

TEST_CASE("silhouette bounds") { require_clean(silhouette_property(kCases, 303)); }

TEST_CASE("centrality normalization") { require_clean(centrality_property(kCases, 404)); }

TEST_CASE("sentiment bounds") { require_clean(sentiment_property(kCases, 505)); }

TEST_CASE("dtw metric-like properties") { require_clean(dtw_property(kCases, 606)); }
