#include <sstream>

#include "doctest.h"
#include "mfc/csv.hpp"
#include "mfc/sim.hpp"

using namespace mfc;

TEST_SUITE("csv") {
  TEST_CASE("header") {
    CHECK(csv_header(3) == "t,e,y,y_d,u,V,w,Gamma,x1,x2,x3,xistar1,xistar2,xistar3,xin1,xin2,xin3");
    CHECK(csv_header(1) == "t,e,y,y_d,u,V,w,Gamma,x1,xistar1,xin1");
  }

  TEST_CASE("full precision round trip") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
      CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(1.31640625) == "1.31640625");
  }

  TEST_CASE("rows") {
    SimConfig cfg = study_config(Variant::mfc);
    cfg.horizon = 0.05;
    const SimResult r = run(cfg);
    std::ostringstream out;
    write_csv(out, r);
    const std::string text = out.str();
    CHECK(text.find('\r') == std::string::npos);
    std::istringstream in(text);
    std::string line;
    std::size_t rows = 0;
    std::getline(in, line);
    while (std::getline(in, line)) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 16);
    }
    CHECK(rows == r.series.size());
    CHECK(text.substr(text.find('\n') + 1, 6) == "0,1,1,");
  }
}
