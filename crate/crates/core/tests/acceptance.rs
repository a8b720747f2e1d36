//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use common::*;
use dimerlab::deformation::{
    build_deformation_data, deform, Assignment, DeformOptions, DeformationRequest, RemovalSchedule, Side,
};
use dimerlab::dimer::{isomorphic, periodic_cover, DimerModel};
use dimerlab::face_mutation::{LabeledModel, Variant};
use dimerlab::lattice::{edge_normals, gl2z_canonical_form, LatticePolygon, SlopeMultiset};
use dimerlab::matchings::{
    binomial, boundary_counts, enumerate_pms, height_census, height_change, is_nondegenerate, pm_polygon,
    pm_polygon_fast, PerfectMatching,
};
use dimerlab::polygon_mutation::{context_for_normal, make_context, mutate, mutate_via_dual};
use dimerlab::verify::{verify_theorem, VerifyRequest};
use dimerlab::zigzag::{crossing_count, is_consistent, is_isoradial, is_properly_ordered, zigzag_paths};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn gamma() -> (DimerModel, Vec<PerfectMatching>) {
    let m = model("gamma_4b");
    let pms = GAMMA_PMS.iter().map(|names| matching(&m, names)).collect();
    (m, pms)
}

fn criterion_1() -> Outcome {
    let (m, p) = gamma();
    let n = enumerate_pms(&m).len();
    ensure!(n == 8, "{n} matchings");
    let res = pm_polygon(&m, Some(&p[0])).map_err(|e| e.to_string())?;
    let expected = poly(&[(1, 0), (1, 1), (-1, 0), (0, -1)]);
    ensure!(res.polygon == expected, "polygon {:?}", res.polygon.vertices());
    for v in res.polygon.vertices() {
        ensure!(res.at(*v).len() == 1, "corner {v} has {} matchings", res.at(*v).len());
    }
    Ok("8 matchings, polygon and unique corners match".into())
}

fn criterion_2() -> Outcome {
    let (m, p) = gamma();
    let expected = [lv(1, 0), lv(1, 1), lv(-1, 0), lv(0, -1)];
    for (i, e) in expected.iter().enumerate() {
        let h = height_change(&m, &p[i + 1], &p[0]);
        ensure!(h == *e, "h(P{},P0) = {h}, expected {e}", i + 1);
    }
    let h23 = height_change(&m, &p[2], &p[3]);
    ensure!(h23 == lv(2, 1), "h(P2,P3) = {h23}");
    Ok("h(P1..P4,P0) and h(P2,P3) = (2,1)".into())
}

fn criterion_3() -> Outcome {
    let m = model("gamma_4b");
    let z = zigzag_paths(&m);
    ensure!(z.len() == 4, "{} paths", z.len());
    ensure!(z[2].len() == 6 && z[2].slope == lv(-1, -1), "z3 has length {} and slope {}", z[2].len(), z[2].slope);
    let counts: Vec<usize> = [0, 1, 3].iter().map(|&k| crossing_count(&z[k], &z[2])).collect();
    ensure!(counts == [1, 3, 2], "crossing counts with z3: {counts:?}");
    let slopes = SlopeMultiset::from_entries(z.iter().map(|p| p.slope)).map_err(|e| e.to_string())?;
    let normals = edge_normals(&pm_polygon_fast(&m).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure!(slopes == normals, "slopes {:?} vs normals {:?}", slopes.entries(), normals.entries());
    ensure!(is_consistent(&m) && is_properly_ordered(&m) && is_isoradial(&m), "consistency predicates");
    Ok("4 paths, z3 = (6, (-1,-1)), crossings 1/3/2, slopes = normals, all predicates true".into())
}

fn verify_gamma(side: Side) -> Result<dimerlab::verify::VerifyReport, String> {
    let (m, p) = gamma();
    let req = VerifyRequest {
        deformation: DeformationRequest::new(2, 1, side),
        options: DeformOptions::default(),
        p0: Some(p[0].clone()),
        mutation: None,
    };
    verify_theorem(&m, &req).map_err(|e| e.to_string())
}

fn criterion_4() -> Outcome {
    let (m, p) = gamma();
    let delta = pm_polygon(&m, Some(&p[0])).map_err(|e| e.to_string())?.polygon;
    for (side, sign, target) in [
        (Side::Zig, 1, poly(&[(-1, 0), (1, 1), (3, -1), (2, -1)])),
        (Side::Zag, -1, poly(&[(0, -1), (1, 0), (1, 1), (-1, 3)])),
    ] {
        let data = build_deformation_data(&m, &DeformationRequest::new(2, 1, side)).map_err(|e| e.to_string())?;
        ensure!(data.weights == [2], "{side:?}: weights {:?}", data.weights);
        // mutation at w = (1,1) with F = conv{0, (1,-1)} or -F
        let ctx = context_for_normal(&delta, lv(1, 1), sign * lv(1, -1)).map_err(|e| e.to_string())?;
        let mutated = mutate(&ctx).map_err(|e| e.to_string())?;
        ensure!(mutated == target, "{side:?}: mutation gives {:?}", mutated.vertices());
        let r = verify_gamma(side)?;
        ensure!(r.passed(), "{side:?}: verify verdict {}", r.verdict);
        ensure!(r.deformed_polygon == target, "{side:?}: deformed polygon {:?}", r.deformed_polygon.vertices());
    }
    Ok("zig and zag polygons equal the mutations under the placement convention".into())
}

fn criterion_5() -> Outcome {
    let zig = verify_gamma(Side::Zig)?.deformed_polygon;
    let zag = verify_gamma(Side::Zag)?.deformed_polygon;
    ensure!(zig != zag, "zig and zag polygons coincide before normalisation");
    ensure!(gl2z_canonical_form(&zig) == gl2z_canonical_form(&zag), "canonical forms differ");
    Ok("canonical forms coincide".into())
}

fn criterion_6() -> Outcome {
    let m = model("pentagon_iso");
    ensure!(is_isoradial(&m), "the input model is not isoradial");
    let data = build_deformation_data(&m, &DeformationRequest::new(2, 1, Side::Zig)).map_err(|e| e.to_string())?;
    ensure!(data.weights == [1], "weights {:?}", data.weights);
    let out = deform(&m, &data, &DeformOptions::default()).map_err(|e| e.to_string())?.result;
    ensure!(is_consistent(&out), "result not consistent");
    ensure!(!is_isoradial(&out), "result is isoradial");
    Ok("consistent and not isoradial".into())
}

fn hexagon4_hexagon() -> LatticePolygon {
    poly(&[(2, -1), (2, 3), (-2, 3), (-3, 2), (-3, 1), (-2, -1)])
}

fn hexagon4_mutated() -> LatticePolygon {
    poly(&[(2, -1), (2, 3), (1, 3), (-1, 2), (-2, 1), (-3, -1)])
}

fn criterion_7() -> Outcome {
    let ctx = make_context(&hexagon4_hexagon(), 3, 1).map_err(|e| e.to_string())?;
    ensure!(ctx.w == lv(0, -1) && ctx.u_e == lv(-1, 0), "edge 3 gives w = {}, u_E = {}", ctx.w, ctx.u_e);
    let target = hexagon4_mutated();
    let mutated = mutate(&ctx).map_err(|e| e.to_string())?;
    ensure!(mutated == target, "mutation gives {:?}", mutated.vertices());

    let m = model("hexagon4");
    let data = build_deformation_data(&m, &hexagon4_request()).map_err(|e| e.to_string())?;
    let sizes: Vec<usize> = data.params.iter().map(|x| x.len()).collect();
    ensure!(sizes == [1, 1, 2], "|X_i| = {sizes:?}");
    let mut results = Vec::new();
    for name in ["hexagon4_schedule_a.json", "hexagon4_schedule_b.json"] {
        let opts = DeformOptions { schedule: schedule(name), shortcut: false };
        let out = deform(&m, &data, &opts).map_err(|e| e.to_string())?;
        ensure!(is_nondegenerate(&out.pre_restoration), "{name}: pre-restoration model is degenerate");
        ensure!(!is_consistent(&out.pre_restoration), "{name}: pre-restoration model is consistent");
        ensure!(is_consistent(&out.result), "{name}: result not consistent");
        let p = pm_polygon_fast(&out.result).map_err(|e| e.to_string())?;
        ensure!(normalized(&p) == normalized(&target), "{name}: polygon {:?}", p.vertices());
        let report = verify_theorem(
            &m,
            &VerifyRequest { deformation: hexagon4_request(), options: opts, p0: None, mutation: None },
        )
        .map_err(|e| e.to_string())?;
        ensure!(report.passed(), "{name}: verify verdict {}", report.verdict);
        results.push(out.result);
    }
    ensure!(!isomorphic(&results[0], &results[1]), "schedules A and B give isomorphic models");
    Ok("hexagon mutation, schedules A/B consistent with that polygon and non-isomorphic".into())
}

fn criterion_8() -> Outcome {
    let b = drawing("hexagon4_b");
    let a = drawing("hexagon4_a").model;
    let mut lm = LabeledModel::new(b.model, b.labels);
    for face in 1..=10 {
        lm = lm.mutate(&face.to_string(), Variant::Black).map_err(|e| format!("face {face}: {e}"))?;
    }
    ensure!(isomorphic(&lm.model, &a), "result is not isomorphic to the type A model");
    Ok("faces 1..10 take the type B model to the type A model".into())
}

fn run_property<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), String>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    runner
        .run(&strategy, |v| test(v).map_err(TestCaseError::fail))
        .map_err(|e| format!("{name}: {e}"))
}

fn with_matchings(n: usize) -> impl Strategy<Value = ((usize, Vec<Step>), Vec<Vec<u64>>)> {
    (perturbed_fixture(false), prop::collection::vec(prop::collection::vec(any::<u64>(), 0..96), n))
}

fn perturbed(case: &(usize, Vec<Step>)) -> DimerModel {
    apply(&fixtures()[case.0].1, &case.1)
}

/// Deformed polygons for every sub-zigzag assignment, built once.
fn hexagon4_assignment_polygons() -> &'static BTreeMap<Vec<usize>, Result<LatticePolygon, String>> {
    static P: std::sync::OnceLock<BTreeMap<Vec<usize>, Result<LatticePolygon, String>>> = std::sync::OnceLock::new();
    P.get_or_init(|| {
        let m = model("hexagon4");
        let mut out = BTreeMap::new();
        for code in 0..81usize {
            let by: Vec<usize> = (0..4).map(|i| code / 3usize.pow(i) % 3).collect();
            let mut req = hexagon4_request();
            req.assignment = Assignment::BySubzigzag(by.clone());
            let Ok(data) = build_deformation_data(&m, &req) else { continue };
            let res = deform(&m, &data, &DeformOptions::default())
                .map_err(|e| e.to_string())
                .and_then(|o| pm_polygon_fast(&o.result).map_err(|e| e.to_string()));
            out.insert(by, res.map(|p| normalized(&p)));
        }
        out
    })
}

fn criterion_9() -> Outcome {
    let mut notes = Vec::new();
    run_property("cocycle law", with_matchings(3), |(case, keys)| {
        let m = perturbed(&case);
        let p: Vec<PerfectMatching> = keys.iter().map(|k| sample_pm(&m, k)).collect();
        check_cocycle(&m, &p[0], &p[1], &p[2])
    })?;
    run_property("meet-count identity", with_matchings(1), |(case, keys)| {
        let m = perturbed(&case);
        check_meet_formula(&m, &sample_pm(&m, &keys[0]))
    })?;
    run_property("same-slope length defect", with_matchings(1), |(case, keys)| {
        let m = perturbed(&case);
        check_length_defect(&m, &sample_pm(&m, &keys[0]))
    })?;
    run_property("uniform crossing counts", perturbed_fixture(true), |case| check_uniform_crossings(&perturbed(&case)))?;
    run_property("mutation involution", admissible_context(), |ctx| {
        let q = mutate(&ctx).map_err(|e| e.to_string())?;
        let back = context_for_normal(&q, -ctx.w, ctx.u_e).and_then(|c| mutate(&c)).map_err(|e| e.to_string())?;
        if back == ctx.polygon {
            Ok(())
        } else {
            Err(format!("{:?} came back as {:?}", ctx.polygon.vertices(), back.vertices()))
        }
    })?;
    run_property("mutate == mutate_via_dual", admissible_context(), |ctx| {
        let a = mutate(&ctx).map_err(|e| e.to_string())?;
        let b = mutate_via_dual(&ctx).map_err(|e| e.to_string())?;
        if a == b {
            Ok(())
        } else {
            Err(format!("{:?} vs {:?}", a.vertices(), b.vertices()))
        }
    })?;
    let table = hexagon4_assignment_polygons();
    let valid: Vec<&Vec<usize>> = table.keys().collect();
    ensure!(valid.len() >= 3, "only {} assignments", valid.len());
    let reference = normalized(&hexagon4_mutated());
    run_property("assignment independence", prop::sample::select(valid.clone()), |by| match &table[by] {
        Ok(p) if *p == reference => Ok(()),
        Ok(p) => Err(format!("assignment {by:?} gives {:?}", p.vertices())),
        Err(e) => Err(format!("assignment {by:?}: {e}")),
    })?;
    notes.push(format!("{} assignments", valid.len()));

    let m = model("hexagon4");
    let census = height_census(&m, lv(0, 0));
    let p = pm_polygon_fast(&m).map_err(|e| e.to_string())?;
    let top = boundary_counts(&p, &census)
        .into_iter()
        .find(|edge| edge.len() == 5 && edge[0].0.y == edge[4].0.y && edge[0].0.y == p.vertices().iter().map(|v| v.y).max().unwrap())
        .ok_or("no top edge of length 4")?;
    let counts: Vec<u64> = top.iter().map(|x| x.1).collect();
    ensure!(counts == [1, 4, 6, 4, 1], "top edge counts {counts:?}");
    ensure!((0..=4).all(|k| counts[k as usize] == binomial(4, k)), "counts differ from C(4,m)");
    Ok(format!("all property suites hold at 100 cases each ({}); top edge 1,4,6,4,1", notes.join(", ")))
}

fn shortcut_agrees(m: &DimerModel, k: usize, r: usize, side: Side) -> Result<(), String> {
    let data = build_deformation_data(m, &DeformationRequest::new(k, r, side)).map_err(|e| e.to_string())?;
    let full = deform(m, &data, &DeformOptions::default()).map_err(|e| e.to_string())?;
    let short = deform(m, &data, &DeformOptions { schedule: RemovalSchedule::Auto, shortcut: true })
        .map_err(|e| e.to_string())?;
    ensure!(short.shortcut_used, "shortcut not taken for path {k}, r = {r}");
    let a = pm_polygon_fast(&full.result).map_err(|e| e.to_string())?;
    let b = pm_polygon_fast(&short.result).map_err(|e| e.to_string())?;
    ensure!(a == b, "path {k}, r = {r}, {side:?}: {:?} vs {:?}", a.vertices(), b.vertices());
    Ok(())
}

fn criterion_10() -> Outcome {
    let hex = periodic_cover(&model("honeycomb"), 3, 3);
    for (k, r) in [(0, 1), (0, 2), (3, 2), (6, 2)] {
        for side in [Side::Zig, Side::Zag] {
            shortcut_agrees(&hex, k, r, side)?;
        }
    }
    let m = model("gamma_4b");
    for k in 0..4 {
        for side in [Side::Zig, Side::Zag] {
            if build_deformation_data(&m, &DeformationRequest::new(k, 1, side)).is_ok() {
                shortcut_agrees(&m, k, 1, side)?;
            }
        }
    }
    Ok("shortcut and full pipeline agree on the 3x3 honeycomb and on gamma_4b with r = 1".into())
}

fn main() {
    let start = std::time::Instant::now();
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        let t = std::time::Instant::now();
        let outcome = f();
        let took = t.elapsed();
        match outcome {
            Ok(msg) => println!("criterion {n}: PASS ({msg}) [{took:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n}: FAIL ({msg}) [{took:.2?}]");
            }
        }
    }
    println!("acceptance: {} of 10 passed in {:.2?}", 10 - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
