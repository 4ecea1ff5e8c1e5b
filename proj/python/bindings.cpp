#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sheafcheck/claims.hpp"
#include "sheafcheck/cnf.hpp"
#include "sheafcheck/error.hpp"
#include "sheafcheck/oracle.hpp"
#include "sheafcheck/prop.hpp"
#include "sheafcheck/sheaf.hpp"
#include "sheafcheck/topology.hpp"

namespace py = pybind11;
using namespace sheafcheck;

namespace {

py::object fraction(const Rational& r) {
  static py::object Fraction = py::module_::import("fractions").attr("Fraction");
  return Fraction(r.numerator(), r.denominator());
}

py::tuple values(const cnf::Assignment& a) {
  py::tuple t(a.values().size());
  for (std::size_t i = 0; i < a.values().size(); ++i) t[i] = py::bool_(a.values()[i]);
  return t;
}

py::list model_list(const std::vector<cnf::Assignment>& as) {
  py::list out;
  for (const auto& a : as) out.append(values(a));
  return out;
}

std::vector<std::size_t> betti_of(const cnf::CnfFormula& f, bool dual) {
  return topology::betti(dual ? topology::dowker_dual(f) : topology::clause_complex(f)).b;
}

std::vector<std::string> upset_sections(const cnf::CnfFormula& f, const std::string& sigma) {
  const auto sh = sheaf::build_sheaf(f);
  const auto& k = sh.complex();
  std::vector<std::string> out;
  for (const auto& s : sheaf::sections(sh, topology::up_set(k, k.parse_simplex(sigma)))) out.push_back(s.dump(k));
  return out;
}

py::dict distribution_dict(const oracle::RatingDistribution& d) {
  py::dict out;
  out["counts"] = std::vector<std::size_t>(d.counts.begin(), d.counts.end());
  out["n_success"] = d.n_success;
  out["n_fail"] = d.n_fail;
  out["mean"] = d.exact_mean() ? fraction(*d.exact_mean()) : py::none();
  out["stddev"] = d.stddev() ? py::cast(*d.stddev()) : py::none();
  out["bimodal"] = d.bimodal() ? py::cast(*d.bimodal()) : py::none();
  return out;
}

oracle::RatingDistribution distribution_from(const std::vector<std::size_t>& counts, std::size_t n_fail) {
  if (counts.size() != 11) throw InputError("counts must have 11 bins (ratings 0..10)");
  std::array<std::size_t, 11> c{};
  std::copy(counts.begin(), counts.end(), c.begin());
  return oracle::RatingDistribution::from_counts(c, n_fail);
}

}  // namespace

PYBIND11_MODULE(_sheafcheck, m) {
  m.doc() = "Claim-consistency engine: CNF, sheaf sections, homology and rating analysis";

  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<EnvironmentError> env_error(m, "EnvironmentError", PyExc_RuntimeError);
  static py::exception<oracle::TransportError> transport_error(m, "TransportError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      input_error(e.what());
    } catch (const EnvironmentError& e) {
      env_error(e.what());
    } catch (const oracle::TransportError& e) {
      transport_error(e.what());
    }
  });

  m.attr("SOURCE_DATA_DIR") = SHEAFCHECK_DATA_DIR;

  py::class_<cnf::CnfFormula>(m, "CnfFormula")
      .def_property_readonly("variables", [](const cnf::CnfFormula& f) { return f.vocabulary().names(); })
      .def_property_readonly("num_vars", &cnf::CnfFormula::num_vars)
      .def_property_readonly("num_clauses", &cnf::CnfFormula::num_clauses)
      .def("to_dimacs", &cnf::emit_dimacs)
      .def("__repr__", &cnf::CnfFormula::to_string);

  m.def("parse_dimacs", &cnf::parse_dimacs, py::arg("text"));
  m.def(
      "from_prop",
      [](const std::string& text, std::vector<std::string> vocabulary) {
        const auto f = cnf::parse_prop(text);
        if (vocabulary.empty()) vocabulary = f.atoms();
        return cnf::clausify(f, cnf::Vocabulary(vocabulary));
      },
      py::arg("text"), py::arg("vocabulary") = std::vector<std::string>{},
      "Equivalent CNF of an infix formula such as 'a -> (b | !c)'.");
  m.def("enumerate_models", [](const cnf::CnfFormula& f) { return model_list(cnf::enumerate_models(f)); });
  m.def("count_models", &cnf::count_models);
  m.def("satisfiable", &cnf::satisfiable);
  m.def("conjoin", &cnf::conjoin);
  m.def("relative_consistency",
        [](const cnf::CnfFormula& p, const cnf::CnfFormula& q) { return fraction(cnf::relative_consistency(p, q)); });
  m.def(
      "max_sat",
      [](const std::string& wdimacs) {
        const auto r = cnf::max_sat(cnf::parse_wdimacs(wdimacs));
        return py::make_tuple(fraction(r.achieved_weight), values(r.assignment), r.satisfied_clauses);
      },
      py::arg("wdimacs"), "Returns (achieved weight, assignment, satisfied clause indices).");

  m.def("betti", &betti_of, py::arg("formula"), py::arg("dual") = false);
  m.def(
      "maximal_simplices",
      [](const cnf::CnfFormula& f, bool dual) {
        const auto k = dual ? topology::dowker_dual(f) : topology::clause_complex(f);
        std::vector<std::string> out;
        for (const auto& s : k.maximal_simplices()) out.push_back(k.format(s));
        return out;
      },
      py::arg("formula"), py::arg("dual") = false);
  m.def("upset_sections", &upset_sections, py::arg("formula"), py::arg("sigma"),
        "Sections over the up-set of a face such as 'y' or 'x,y'.");
  m.def("global_sections", [](const cnf::CnfFormula& f) {
    return model_list(sheaf::global_sections(sheaf::build_sheaf(f)));
  });

  m.def("initialization_prompt", [] { return std::string(oracle::initialization_prompt()); });
  m.def("user_message", [](const std::string& a, const std::string& b) {
    return oracle::user_message({"a", a}, {"b", b});
  });
  m.def("extract_rating", &oracle::extract_rating, py::arg("reply"));
  m.def(
      "distribution",
      [](const std::vector<std::optional<int>>& ratings) {
        return distribution_dict(oracle::RatingDistribution::from_ratings(ratings));
      },
      py::arg("ratings"), "Histogram and statistics of ratings; None marks a failed extraction.");
  m.def(
      "detect_bimodality",
      [](const std::vector<std::size_t>& counts) { return oracle::detect_bimodality(distribution_from(counts, 0)); },
      py::arg("counts"));
  m.def(
      "rate_pair_mock",
      [](const std::string& a, const std::string& b, const std::filesystem::path& fixtures, std::size_t n,
         std::uint64_t seed) {
        oracle::OracleConfig cfg;
        cfg.n_repeats = n;
        cfg.seed = seed;
        oracle::FixtureTransport t(fixtures);
        oracle::RatingDistribution d;
        {
          py::gil_scoped_release release;
          d = oracle::rate_pair(cfg, t, {"a", a}, {"b", b});
        }
        return distribution_dict(d);
      },
      py::arg("claim_a"), py::arg("claim_b"), py::arg("fixtures"), py::arg("n") = 100, py::arg("seed") = 0,
      "Rates a claim pair against recorded mock replies.");

  m.def(
      "analyze_corpus",
      [](const std::filesystem::path& path, const std::string& format) {
        const auto report = claims::analyze(claims::load_corpus(path));
        if (format == "json") return claims::report_json(report);
        if (format == "markdown") return claims::report_markdown(report);
        throw InputError("format must be 'json' or 'markdown'");
      },
      py::arg("path"), py::arg("format") = "json", "Analyzes a corpus with recorded ratings.");
}
