// Compiles the amalgamated Catch2 v3 distribution (including its default
// main) into a static library, so the test translation units only pay for
// the header.
#include <catch2/catch_amalgamated.cpp>
