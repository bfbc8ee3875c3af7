#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>

#include "hoalign/config.hpp"
#include "hoalign/emission.hpp"
#include "hoalign/error.hpp"
#include "hoalign/grids.hpp"
#include "hoalign/metrics.hpp"
#include "hoalign/pipeline.hpp"
#include "hoalign/raster.hpp"
#include "hoalign/raycast.hpp"
#include "hoalign/results_io.hpp"
#include "hoalign/sampling.hpp"
#include "hoalign/synthetic.hpp"
#include "hoalign/viterbi.hpp"

namespace py = pybind11;
using namespace hoalign;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IndexArray = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>;

std::vector<Vec3> to_points(const DoubleArray& a) {
  if (a.ndim() != 2 || a.shape(1) != 3) throw py::value_error("expected an (N, 3) array");
  auto r = a.unchecked<2>();
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i) out.emplace_back(r(i, 0), r(i, 1), r(i, 2));
  return out;
}

py::array_t<double> from_points(const std::vector<Vec3>& pts) {
  py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (int k = 0; k < 3; ++k) w(static_cast<py::ssize_t>(i), k) = pts[i][k];
  return out;
}

Quat to_quat(const DoubleArray& a) {
  if (a.size() != 4) throw py::value_error("expected a quaternion [w, x, y, z]");
  const double* d = a.data();
  return quat_wxyz(d[0], d[1], d[2], d[3]);
}

py::array_t<double> from_quat(const Quat& q) {
  py::array_t<double> out(4);
  auto w = out.mutable_unchecked<1>();
  w(0) = q.w();
  w(1) = q.x();
  w(2) = q.y();
  w(3) = q.z();
  return out;
}

TriangleMesh to_mesh(const DoubleArray& vertices, const IndexArray& faces) {
  if (faces.ndim() != 2 || faces.shape(1) != 3) throw py::value_error("expected an (F, 3) face array");
  auto f = faces.unchecked<2>();
  std::vector<Face> out;
  for (py::ssize_t i = 0; i < f.shape(0); ++i) {
    out.push_back({static_cast<std::uint32_t>(f(i, 0)), static_cast<std::uint32_t>(f(i, 1)),
                   static_cast<std::uint32_t>(f(i, 2))});
  }
  return TriangleMesh(to_points(vertices), std::move(out));
}

EmissionTable to_table(const DoubleArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a (T, S) array");
  const auto t = static_cast<std::size_t>(a.shape(0)), s = static_cast<std::size_t>(a.shape(1));
  return EmissionTable(t, s, std::vector<double>(a.data(), a.data() + t * s));
}

using Decoder = StatePath (*)(const EmissionTable&, const TransitionCost&, double);

py::tuple decode(Decoder fn, const DoubleArray& emissions, const DoubleArray& transitions, double lambda) {
  const EmissionTable e = to_table(emissions);
  const auto s = static_cast<py::ssize_t>(e.states());
  if (transitions.ndim() != 2 || transitions.shape(0) != s || transitions.shape(1) != s) {
    throw py::value_error("transitions must be an (S, S) array");
  }
  const std::vector<double> a(transitions.data(), transitions.data() + s * s);
  const auto n = e.states();
  const StatePath p = fn(e, [&](std::size_t, std::size_t i, std::size_t j) { return a[i * n + j]; }, lambda);
  return py::make_tuple(p.states, p.total_cost);
}

Camera make_camera(double fx, double fy, double cx, double cy, int width, int height) {
  Camera c{fx, fy, cx, cy, width, height};
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pose-grid alignment of object meshes to observed point clouds.";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def("chamfer_distance", [](const DoubleArray& a, const DoubleArray& b) {
    return chamfer_distance(to_points(a), to_points(b));
  }, py::arg("a"), py::arg("b"), "Symmetric mean squared nearest-neighbour distance in cm^2.");

  m.def("f_score", [](const DoubleArray& pred, const DoubleArray& gt, double threshold) {
    const FScore f = f_score(to_points(pred), to_points(gt), threshold);
    return py::make_tuple(f.precision, f.recall, f.f);
  }, py::arg("pred"), py::arg("gt"), py::arg("threshold"), "(precision, recall, F) at a threshold in meters.");

  m.def("estimate_scale", [](const DoubleArray& observed, const DoubleArray& model) {
    return estimate_scale(to_points(observed), to_points(model));
  }, py::arg("observed"), py::arg("model"));

  m.def("rodrigues_error", [](const DoubleArray& a, const DoubleArray& b) {
    return rodrigues_error(to_quat(a), to_quat(b));
  }, py::arg("a"), py::arg("b"), "Geodesic angle in radians between two [w, x, y, z] rotations.");

  m.def("rotation_grid", [](int level) {
    const RotationGrid g = build_rotation_grid(level);
    py::array_t<double> out({static_cast<py::ssize_t>(g.size()), py::ssize_t{4}});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto row = static_cast<py::ssize_t>(i);
      w(row, 0) = g[i].w();
      w(row, 1) = g[i].x();
      w(row, 2) = g[i].y();
      w(row, 3) = g[i].z();
    }
    return out;
  }, py::arg("level"), "Rotation grid as an (N, 4) array of [w, x, y, z].");

  m.def("covering_radius", [](int level, std::size_t samples, std::uint64_t seed) {
    return estimate_covering_radius(build_rotation_grid(level), samples, seed);
  }, py::arg("level"), py::arg("samples") = 100000, py::arg("seed") = 0);

  m.def("viterbi_decode", [](const DoubleArray& e, const DoubleArray& a, double lambda) {
    return decode(&viterbi_decode, e, a, lambda);
  }, py::arg("emissions"), py::arg("transitions"), py::arg("lam") = 1.0,
        "Min-sum decoding of a (T, S) cost table with (S, S) transitions; returns (states, total_cost).");

  m.def("brute_force_decode", [](const DoubleArray& e, const DoubleArray& a, double lambda) {
    return decode(&brute_force_decode, e, a, lambda);
  }, py::arg("emissions"), py::arg("transitions"), py::arg("lam") = 1.0);

  m.def("icp_with_scaling", [](const DoubleArray& source, const DoubleArray& target, std::size_t max_iters,
                               double tol, const std::string& correspondence) {
    IcpOptions opt;
    opt.max_iters = max_iters;
    opt.tol = tol;
    if (correspondence == "index") {
      opt.correspondence = Correspondence::kIndex;
    } else if (correspondence != "nearest") {
      throw py::value_error("correspondence must be 'nearest' or 'index'");
    }
    const IcpResult r = icp_with_scaling(to_points(source), to_points(target), opt);
    py::dict d;
    d["rotation_wxyz"] = from_quat(r.transform.rotation());
    d["translation"] = from_points({r.transform.translation()}).reshape({3});
    d["scale"] = r.transform.scale();
    d["iterations"] = r.iterations;
    d["rms_history"] = r.rms_history;
    return d;
  }, py::arg("source"), py::arg("target"), py::arg("max_iters") = 100, py::arg("tol") = 1e-6,
        py::arg("correspondence") = "nearest");

  m.def("sample_hand_points", [](const DoubleArray& vertices, const IndexArray& faces, double fx, double fy,
                                 double cx, double cy, int width, int height) {
    const HandPointMap hits = sample_hand_points(to_mesh(vertices, faces), make_camera(fx, fy, cx, cy, width, height));
    py::array_t<double> out({static_cast<py::ssize_t>(height), static_cast<py::ssize_t>(width), py::ssize_t{3}});
    auto w = out.mutable_unchecked<3>();
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width; ++c) {
        for (int k = 0; k < 3; ++k) {
          w(r, c, k) = hits.is_hit(c, r) ? hits.point(c, r)[k] : std::numeric_limits<double>::quiet_NaN();
        }
      }
    }
    return out;
  }, py::arg("vertices"), py::arg("faces"), py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"),
        py::arg("width"), py::arg("height"), "(H, W, 3) first-hit points, NaN where the ray misses.");

  m.def("normalize_points", [](const DoubleArray& points, double s) {
    const NormalizedPoints n = normalize_points(to_points(points), s);
    return py::make_tuple(from_points(n.points), from_points({n.params.mean}).reshape({3}), n.params.sigma);
  }, py::arg("points"), py::arg("s") = 0.7, "Returns (normalized points, mean, sigma).");

  m.def("rasterize_silhouette", [](const DoubleArray& vertices, const IndexArray& faces, double fx, double fy,
                                   double cx, double cy, int width, int height) {
    const BinaryMask mask =
        rasterize_silhouette(to_mesh(vertices, faces), SimilarityTransform(), make_camera(fx, fy, cx, cy, width, height));
    py::array_t<bool> out({static_cast<py::ssize_t>(height), static_cast<py::ssize_t>(width)});
    auto w = out.mutable_unchecked<2>();
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) w(r, c) = mask.at(c, r);
    return out;
  }, py::arg("vertices"), py::arg("faces"), py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"),
        py::arg("width"), py::arg("height"));

  m.def("synth", [](const std::string& out_dir, const std::string& config_path) {
    const RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    write_synthetic_scene(out_dir, generate_synthetic_scene(config), config);
    return (std::filesystem::path(out_dir) / "scene.cfg").string();
  }, py::arg("out_dir"), py::arg("config") = "", "Writes a synthetic scene; returns the path of its scene.cfg.");

  m.def("track", [](const std::string& config_path, const std::string& out_dir) {
    py::gil_scoped_release release;
    const TrackResult r = run_track(load_inputs(load_config(config_path), Command::kTrack));
    write_track_outputs(out_dir, r);
    return track_to_json(r.alignment.track);
  }, py::arg("config"), py::arg("out_dir"), "Runs sequence alignment and writes its outputs; returns the track JSON.");
}
