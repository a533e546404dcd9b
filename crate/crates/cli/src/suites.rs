//! Randomized verification suites over the blocks of a document.

use daff_core::atlas::{check_atlas_model_hull, cocycle_check, Atlas, CocycleReport, Side};
use daff_core::double::{adjoint_duality_check, hvh_iso, interchange_sides, DoubleAffine, DoublePoint};
use daff_core::exact::{Ring, Vector};
use daff_core::naffine::{compose_maps, filtration_violation, random_filtered_map, side_duality_checks, NAffine};
use daff_core::phase::{phase_tower_checks, tau_kappa_checks};
use daff_core::random::{self, trial_rng, TrialRng};

use crate::model::{Named, Object};
use crate::report::Report;

pub const SUITES: &[&str] = &[
    "interchange",
    "model-hull",
    "cocycle",
    "duality-pairing",
    "hvh",
    "phase-tower",
    "tau-kappa",
    "naffine",
];

/// Stream for trial `t` of the block at `index`.
fn rng_for(seed: u64, index: usize, t: usize) -> TrialRng {
    trial_rng(seed, ((index as u64) << 32) | t as u64)
}

fn trials_until<F>(trials: usize, mut body: F) -> daff_core::Result<Option<String>>
where
    F: FnMut(usize) -> daff_core::Result<Option<String>>,
{
    for t in 0..trials {
        if let Some(w) = body(t)? {
            return Ok(Some(format!("trial {t}: {w}")));
        }
    }
    Ok(None)
}

fn interchange(r: &mut Report, name: &str, idx: usize, a: &DoubleAffine) {
    let seed = r.seed;
    let trials = r.trials;
    r.result(
        name,
        "interchange",
        trials_until(trials, |t| {
            let mut rng = rng_for(seed, idx, t);
            let pts: Vec<DoublePoint> = (0..4).map(|_| a.random_point(&mut rng)).collect();
            let (lambda, mu) = (random::rational(&mut rng), random::rational(&mut rng));
            let (lhs, rhs) = interchange_sides(&pts[0], &pts[1], &pts[2], &pts[3], &lambda, &mu)?;
            Ok((lhs != rhs).then(|| format!("{lhs} != {rhs}")))
        }),
    );
    r.result(
        name,
        "core-fiber",
        trials_until(trials, |t| a.core_fiber_check(&mut rng_for(seed, idx, t))),
    );
    r.result(
        name,
        "structure",
        trials_until(trials, |t| a.structure_check(&mut rng_for(seed, idx, t))),
    );
}

fn model_hull_double(r: &mut Report, name: &str, idx: usize, a: &DoubleAffine) {
    let (seed, trials) = (r.seed, r.trials);
    let model = a.model_vv();
    r.result(
        name,
        "membership",
        trials_until(trials, |t| {
            let mut rng = rng_for(seed, idx, t);
            let d = a.space();
            // Mix points of A, of the model and arbitrary points of D.
            let p = match t % 3 {
                0 => a.random_point(&mut rng),
                1 => model.embed(&model.dims().random_point(&mut rng))?,
                _ => d.random_point(&mut rng),
            };
            let v1 = a.l1().dot(&p.y)?;
            let v2 = a.l2().dot(&p.z)?;
            let one = <daff_core::exact::Scalar as Ring>::one();
            let in_a = v1 == one && v2 == one;
            let in_model = Ring::is_zero(&v1) && Ring::is_zero(&v2);
            if a.contains(&p)? != in_a {
                return Ok(Some(format!("{p}: membership in A disagrees with l1 = 1 = l2")));
            }
            if model.contains(&p)? != in_model {
                return Ok(Some(format!("{p}: membership in the model disagrees with l1 = 0 = l2")));
            }
            Ok(None)
        }),
    );
    let hull = a.hull();
    r.outcome(
        name,
        "hull",
        (hull != a.space()).then(|| format!("hull {hull} differs from the ambient {}", a.space())),
    );
}

fn cocycle_witness(c: &CocycleReport) -> Option<String> {
    if let Some(f) = c.failures.first() {
        let (a, b, d) = &f.charts;
        return Some(format!("triangle {a},{b},{d}: {}", f.witness));
    }
    c.singular_samples.first().map(|s| format!("singular at sample {s}"))
}

fn cocycle(r: &mut Report, name: &str, atlas: &Atlas) {
    let base = cocycle_check(atlas);
    r.outcome(name, "cocycle", cocycle_witness(&base));
    if !base.passed() {
        r.skip(name, "cocycle-model", "the atlas itself fails");
        r.skip(name, "cocycle-hull", "the atlas itself fails");
        return;
    }
    r.outcome(name, "cocycle-model", cocycle_witness(&cocycle_check(&atlas.induce_model())));
    r.outcome(name, "cocycle-hull", cocycle_witness(&cocycle_check(&atlas.induce_hull())));
    let mut w = None;
    for (&(a, b), e) in atlas.edges() {
        let v12 = e.data.linearize_along(Side::One).linearize_along(Side::Two);
        let v21 = e.data.linearize_along(Side::Two).linearize_along(Side::One);
        if let Some(d) = v12.first_difference(&v21) {
            w = Some(format!("edge {}->{}: {d}", atlas.charts()[a], atlas.charts()[b]));
            break;
        }
    }
    r.outcome(name, "linearization-order", w);
}

fn model_hull_atlas(r: &mut Report, name: &str, atlas: &Atlas) {
    let rep = check_atlas_model_hull(atlas);
    r.outcome(name, "model-cocycle", cocycle_witness(&rep.model));
    r.outcome(name, "hull-cocycle", cocycle_witness(&rep.hull));
    r.outcome(name, "linearization-order", rep.order_mismatches.first().cloned());
    r.outcome(name, "hull-specialization", rep.specialization_mismatches.first().cloned());
}

fn hvh(r: &mut Report, name: &str, a: &DoubleAffine) {
    let w = match hvh_iso(a) {
        Err(e) => Some(format!("error: {e}")),
        Ok(h) if h.ok() => None,
        Ok(h) => Some(format!(
            "sides identity {}, core minus identity {}, data preserved {}, linear {}",
            h.sides_identity,
            h.core_minus_identity,
            h.data_preserved,
            h.iso.is_linear()
        )),
    };
    r.outcome(name, "hvh", w);
}

fn naffine(r: &mut Report, name: &str, idx: usize, a: &NAffine) {
    let (seed, trials) = (r.seed, r.trials);
    let s = a.space();
    r.result(
        name,
        "filtration-closure",
        trials_until(trials, |t| {
            let mut rng = rng_for(seed, idx, t);
            let f = random_filtered_map(&mut rng, s);
            let g = random_filtered_map(&mut rng, s);
            if let Some(w) = filtration_violation(s, s, &f)? {
                return Ok(Some(format!("generator: {w}")));
            }
            Ok(filtration_violation(s, s, &compose_maps(&f, &g)?)?.map(|w| format!("composite: {w}")))
        }),
    );
    r.result(
        name,
        "core-action",
        trials_until(trials, |t| {
            let mut rng = rng_for(seed, idx, t);
            let p = a.random_point(&mut rng);
            let mut c = random::vector(&mut rng, s.core_dim());
            if s.n() == 1 {
                // The core of an order-1 space is the model, `ker l₁`.
                let l = &a.functionals()[0];
                let k = (0..l.len()).find(|&k| !Ring::is_zero(&l[k])).expect("nonzero functional");
                let shift = l.dot(&c)? / &l[k];
                c = c.try_sub(&Vector::basis(c.len(), k).scale(&shift))?;
            }
            let moved = s.core_translate(&c, &p)?;
            if !a.contains(&moved)? {
                return Ok(Some("core translation leaves the level set".into()));
            }
            for i in 0..s.n() {
                if s.side_projection(i, &moved) != s.side_projection(i, &p) {
                    return Ok(Some(format!("core translation moves the base of structure {}", i + 1)));
                }
            }
            Ok(None)
        }),
    );
    if a.sigma().is_none() {
        r.skip(name, "duality", "no core section");
        return;
    }
    if s.n() < 2 {
        r.skip(name, "duality", "order below 2 has no pair restrictions");
        return;
    }
    let mut rng = rng_for(seed, idx, 0);
    match side_duality_checks(a, &mut rng, trials.min(10)) {
        Ok(checks) => checks.iter().for_each(|c| r.check(name, c)),
        Err(e) => r.outcome(name, "duality", Some(format!("error: {e}"))),
    }
}

fn pairing(r: &mut Report, name: &str, idx: usize, a: &DoubleAffine) {
    if !a.is_special() {
        r.skip(name, "duality-pairing", "no core section");
        return;
    }
    let mut rng = rng_for(r.seed, idx, 0);
    let w = adjoint_duality_check(a, &mut rng, r.trials);
    r.result(name, "duality-pairing", w);
}

pub fn verify(suite: &str, objects: &[Named], seed: u64, trials: usize) -> Option<Report> {
    if !SUITES.contains(&suite) {
        return None;
    }
    let mut r = Report::new(format!("verify {suite}"), seed, trials);
    for (idx, n) in objects.iter().enumerate() {
        let name = n.name.as_str();
        match (suite, &n.object) {
            ("interchange", Object::Double(a)) => interchange(&mut r, name, idx, a),
            ("model-hull", Object::Double(a)) => model_hull_double(&mut r, name, idx, a),
            ("model-hull", Object::Atlas(a)) => model_hull_atlas(&mut r, name, a),
            ("cocycle", Object::Atlas(a)) => cocycle(&mut r, name, a),
            ("duality-pairing", Object::Double(a)) => pairing(&mut r, name, idx, a),
            ("duality-pairing", Object::Graded(g)) if g.sigma().is_some() => {
                for i in 0..g.space().n() {
                    for j in (i + 1)..g.space().n() {
                        let check = format!("pair-{}{}", i + 1, j + 1);
                        let mut rng = rng_for(seed, idx, i * 8 + j);
                        let w = g
                            .restrict_pair(i, j)
                            .and_then(|(d, _)| adjoint_duality_check(&d, &mut rng, trials));
                        r.result(name, &check, w);
                    }
                }
            }
            ("hvh", Object::Double(a)) => {
                if a.is_special() {
                    hvh(&mut r, name, a)
                } else {
                    r.skip(name, "hvh", "no core section")
                }
            }
            ("phase-tower", Object::Special { bundle, omega }) => {
                let mut rng = rng_for(seed, idx, 0);
                match phase_tower_checks(bundle, omega.as_ref(), &mut rng, trials) {
                    Ok(checks) => checks.iter().for_each(|c| r.check(name, c)),
                    Err(e) => r.outcome(name, "phase-tower", Some(format!("error: {e}"))),
                }
            }
            ("tau-kappa", Object::Special { bundle, .. }) => {
                let mut rng = rng_for(seed, idx, 0);
                match tau_kappa_checks(bundle, &mut rng, trials) {
                    Ok(checks) => checks.iter().for_each(|c| r.check(name, c)),
                    Err(e) => r.outcome(name, "tau-kappa", Some(format!("error: {e}"))),
                }
            }
            ("naffine", Object::Graded(g)) => naffine(&mut r, name, idx, g),
            _ => {}
        }
    }
    if r.records.is_empty() {
        r.skip("-", suite, "no block in the document supports this suite");
    }
    Some(r.finish())
}
