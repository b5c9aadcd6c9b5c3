use std::time::{Duration, Instant};

use cyclotomo::construct::{
    build_regular_upolygon, demo_3d_upolyhedron, embed_homothety, embed_instance, Homothety,
};
use cyclotomo::geometry::{convex_hull, in_hull, orientation, slope_of, Point, PointSet};
use cyclotomo::modelset::{generate_patch, PatchSpec};
use cyclotomo::tomo::{uniqueness_oracle, verify_u_polygon, xrays_equal};
use cyclotomo::{CycNum, FieldTag, Rational};

fn tag(n: u32) -> FieldTag {
    FieldTag::new(n).unwrap()
}

#[test]
fn regular_instances_verify() {
    for n in [3u32, 4, 5, 8, 12] {
        let start = Instant::now();
        let inst = build_regular_upolygon(tag(n)).unwrap();
        let big_n = tag(n).big_n as usize;
        assert_eq!(inst.directions.len(), big_n);
        assert_eq!(inst.hull.len(), 2 * big_n, "n={n}");
        for (i, a) in inst.directions.iter().enumerate() {
            for b in &inst.directions[i + 1..] {
                assert!(!slope_of(a).same_value(&slope_of(b)));
            }
        }
        assert!(verify_u_polygon(&inst.vertices().unwrap(), &inst.directions).unwrap());
        assert_eq!(inst.white.len(), inst.grey.len());
        assert!(inst.white.points.iter().all(|p| !inst.grey.contains(p)));
        assert_eq!(inst.white.len() + inst.grey.len(), inst.hull.len());
        assert!(xrays_equal(&inst.white, &inst.grey, &inst.directions));
        assert_ne!(inst.white, inst.grey);
        assert!(start.elapsed() < Duration::from_secs(30));
    }
}

#[test]
fn base_polygon_lies_strictly_inside() {
    for n in [3u32, 4, 5, 8, 12] {
        let t = tag(n);
        let inst = build_regular_upolygon(t).unwrap();
        let k = inst.hull.len();
        for j in 0..t.big_n {
            let v = Point::new(CycNum::zeta_pow(t.big_n, i64::from(j)));
            for i in 0..k {
                assert_eq!(
                    orientation(&inst.hull[i], &inst.hull[(i + 1) % k], &v),
                    std::cmp::Ordering::Greater,
                    "n={n}"
                );
            }
        }
    }
}

#[test]
fn twelvefold_colouring_alternates() {
    let inst = build_regular_upolygon(tag(12)).unwrap();
    let even: Vec<Point> = inst.hull.iter().step_by(2).cloned().collect();
    let even = PointSet::from_points(tag(12), even).unwrap();
    assert!(even == inst.white || even == inst.grey);
}

#[test]
fn common_points_keep_xrays_equal() {
    for n in [4u32, 8] {
        let t = tag(n);
        let inst = build_regular_upolygon(t).unwrap();
        let m = t.point_conductor();
        let s = PointSet::from_points(
            t,
            (0..5).map(|k| Point::new(CycNum::from_ratio(m, k, 3))),
        )
        .unwrap();
        let w = inst.white.union(&s).unwrap();
        let g = inst.grey.union(&s).unwrap();
        assert!(xrays_equal(&w, &g, &inst.directions));
    }
}

fn lattice_patch(radius: i64) -> PointSet {
    let spec = PatchSpec::new(tag(4), Rational::from_integer(radius.into()), None, None).unwrap();
    generate_patch(&spec).unwrap().points
}

fn check_homothety(h: &Homothety, f: &PointSet, patch: &PointSet, dirs: &[cyclotomo::geometry::Direction]) {
    let image = PointSet::from_points(f.tag, f.points.iter().map(|p| h.apply(p))).unwrap();
    assert!(image.points.iter().all(|p| patch.contains(p)));
    assert!(verify_u_polygon(&image, dirs).unwrap());
}

#[test]
fn rational_instance_embeds_by_clearing_denominators() {
    let f = PointSet::from_points(
        tag(4),
        [(0, 0), (1, 0), (1, 1), (0, 1)]
            .iter()
            .map(|&(x, y)| Point::from_xy(4, &Rational::new(x.into(), 3.into()), &Rational::new(y.into(), 3.into()))),
    )
    .unwrap();
    let patch = lattice_patch(3);
    let h = embed_homothety(&f, &patch, 10_000).unwrap();
    assert!(h.lambda.same_value(&CycNum::from_integer(4, 3)));
    let dirs = [
        cyclotomo::geometry::Direction::from_int_xy(1, 0).unwrap(),
        cyclotomo::geometry::Direction::from_int_xy(0, 1).unwrap(),
    ];
    check_homothety(&h, &f, &patch, &dirs);
}

#[test]
fn embedded_regular_instances() {
    for (n, radius, window) in [(4u32, 3i64, None), (3, 3, None), (12, 4, Some("ngon:12:3"))] {
        let t = tag(n);
        let inst = build_regular_upolygon(t).unwrap();
        let spec = PatchSpec::new(
            t,
            Rational::from_integer(radius.into()),
            window.map(|w| w.parse().unwrap()),
            None,
        )
        .unwrap();
        let patch = generate_patch(&spec).unwrap().points;
        let embedded = embed_instance(&inst, &patch, 100_000).unwrap().expect("embedding");
        let h = embedded.homothety.clone().unwrap();
        check_homothety(&h, &inst.vertices().unwrap(), &patch, &inst.directions);
        assert!(xrays_equal(&embedded.white, &embedded.grey, &embedded.directions));
        let interior = embedded.interior.as_ref().unwrap();
        assert!(interior.points.iter().all(|p| in_hull(&embedded.hull, p)));
        let w = embedded.white.union(interior).unwrap();
        let g = embedded.grey.union(interior).unwrap();
        assert!(xrays_equal(&w, &g, &embedded.directions));
        assert_eq!(convex_hull(&embedded.points().unwrap()).len(), embedded.hull.len());
    }
}

#[test]
fn square_lattice_collision_from_the_construction() {
    let inst = build_regular_upolygon(tag(4)).unwrap();
    let patch = lattice_patch(3);
    let embedded = embed_instance(&inst, &patch, 10_000).unwrap().unwrap();
    let points = embedded.points().unwrap();
    assert_eq!(points.len(), 21);
    let r = uniqueness_oracle(&points, &embedded.directions, 21, Duration::from_secs(120)).unwrap();
    assert!(r.found);
    let (f, g) = r.pair.unwrap();
    assert!(xrays_equal(&f, &g, &embedded.directions));
    let only_f: Vec<&Point> = f.points.iter().filter(|p| !g.contains(p)).collect();
    let only_g: Vec<&Point> = g.points.iter().filter(|p| !f.contains(p)).collect();
    let classes = [&embedded.white, &embedded.grey];
    for side in [&only_f, &only_g] {
        let s = PointSet::from_points(tag(4), side.iter().map(|p| (*p).clone())).unwrap();
        assert!(classes.iter().any(|c| **c == s || (c.len() == s.len() && s.points.iter().all(|p| c.contains(p)))));
    }
}

#[test]
fn instance_json_is_self_describing() {
    let inst = build_regular_upolygon(tag(8)).unwrap();
    let doc = inst.to_json().unwrap();
    assert!(doc.u_polygon && doc.xrays_equal);
    assert_eq!(doc.directions.len(), 8);
    assert_eq!(doc.vertices.len(), 16);
    let text = serde_json::to_string(&doc).unwrap();
    let back: cyclotomo::construct::UPolygonJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back, doc);
}

#[test]
fn polyhedron_demo() {
    let r = demo_3d_upolyhedron(1e-9);
    assert_eq!(r.vertex_count, 120);
    assert!(!r.candidates.is_empty());
    assert!(r.identified, "{:?}", r.candidates);
    let c = r.candidates.last().unwrap();
    assert!(c.passed());
    assert_eq!(r.directions.as_ref(), Some(&c.directions));
    assert_eq!(c.directions.len(), 6);
    assert_eq!((c.white, c.grey), (60, 60));
}
