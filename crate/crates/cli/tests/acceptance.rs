//! Acceptance criteria, one line each. Every comparison is exact.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use daff_cli::report::Format;
use daff_cli::{syntax, DEFAULT_SEED};
use daff_core::atlas::{check_atlas_model_hull, cocycle_check, random_atlas};
use daff_core::double::{
    adjoint_duality_check, classify_level_set, hvh_iso, interchange_sides, DecomposedDouble, DoubleAffine,
    DoublePoint, LevelConstraint, LevelVerdict,
};
use daff_core::exact::{int, Matrix, Scalar, Vector};
use daff_core::naffine::{bbl_n, side_bases, side_duality_checks, GradedSpace, NAffine};
use daff_core::phase::{phase_tower_checks, tau_kappa_checks, TrivialBispecial};
use daff_core::random::{self, trial_rng, TrialRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// `Σ wₖ·pₖ` on flat coordinates.
fn weighted(points: &[&DoublePoint], weights: &[Scalar]) -> Vector {
    let flats: Vec<Vector> = points.iter().map(|p| p.flat()).collect();
    (0..flats[0].len())
        .map(|k| {
            flats
                .iter()
                .zip(weights)
                .fold(int(0), |acc, (f, w)| acc + w * &f[k])
        })
        .collect()
}

fn interchange_law() -> Outcome {
    let one = int(1);
    let mut tuples = 0;
    for inst in 0..100u64 {
        let mut rng = trial_rng(1, inst << 16);
        let a = DoubleAffine::random(&mut rng, (3, 3, 3), inst % 2 == 0);
        for t in 0..10u64 {
            let mut rng = trial_rng(1, (inst << 16) | (t + 1));
            let pts: Vec<DoublePoint> = (0..4).map(|_| a.random_point(&mut rng)).collect();
            let (lambda, mu) = (random::rational(&mut rng), random::rational(&mut rng));
            let (lhs, rhs) = interchange_sides(&pts[0], &pts[1], &pts[2], &pts[3], &lambda, &mu)
                .map_err(|e| format!("instance {inst}: {e}"))?;
            // The same square, built by hand.
            let x1 = &pts[0];
            let x2 = DoublePoint::new(x1.y.clone(), pts[1].z.clone(), pts[1].c.clone());
            let y1 = DoublePoint::new(pts[2].y.clone(), x1.z.clone(), pts[2].c.clone());
            let y2 = DoublePoint::new(pts[2].y.clone(), x2.z.clone(), pts[3].c.clone());
            // aff(a, b; t) = t·a + (1 − t)·b
            let w = [
                &mu * &lambda,
                &mu * (&one - &lambda),
                (&one - &mu) * &lambda,
                (&one - &mu) * (&one - &lambda),
            ];
            let expected = weighted(&[x1, &x2, &y1, &y2], &w);
            if lhs.flat() != expected || rhs.flat() != expected {
                return Err(format!("instance {inst} tuple {t}: {lhs} / {rhs} vs {expected}"));
            }
            if !a.contains(&lhs).unwrap() {
                return Err(format!("instance {inst} tuple {t}: {lhs} leaves A"));
            }
            tuples += 1;
        }
    }
    Ok(format!("100 instances, {tuples} tuples, 0 failures"))
}

fn core_fibers() -> Outcome {
    let one = int(1);
    for inst in 0..50u64 {
        let mut rng = trial_rng(2, inst);
        let a = DoubleAffine::random(&mut rng, (3, 3, 3), false);
        if let Some(w) = a.core_fiber_check(&mut rng).map_err(|e| e.to_string())? {
            return Err(format!("fiber {inst}: {w}"));
        }
        let p = a.random_point(&mut rng);
        let q = DoublePoint::new(p.y.clone(), p.z.clone(), random::vector(&mut rng, a.space().n3));
        let lambda = random::rational(&mut rng);
        let by1 = daff_core::double::aff1(&p, &q, &lambda).unwrap();
        let by2 = daff_core::double::aff2(&p, &q, &lambda).unwrap();
        let expected = weighted(&[&p, &q], &[lambda.clone(), &one - &lambda]);
        if by1.flat() != expected || by2.flat() != expected {
            return Err(format!("fiber {inst}: {by1} / {by2} vs {expected}"));
        }
    }
    Ok("50 fibers, aff1 = aff2 pointwise".into())
}

fn model_hull() -> Outcome {
    let one = int(1);
    for inst in 0..100u64 {
        let mut rng = trial_rng(3, inst);
        let a = DoubleAffine::random(&mut rng, (3, 3, 3), inst % 2 == 1);
        let model = a.model_vv();
        if a.hull() != a.space() {
            return Err(format!("instance {inst}: hull {} is not the ambient space", a.hull()));
        }
        for t in 0..6 {
            let p = match t % 3 {
                0 => a.random_point(&mut rng),
                1 => model.embed(&model.dims().random_point(&mut rng)).unwrap(),
                _ => a.space().random_point(&mut rng),
            };
            let v1 = a.l1().dot(&p.y).unwrap();
            let v2 = a.l2().dot(&p.z).unwrap();
            let in_a = v1 == one && v2 == one;
            let in_model = v1 == int(0) && v2 == int(0);
            if a.contains(&p).unwrap() != in_a || model.contains(&p).unwrap() != in_model {
                return Err(format!("instance {inst}: membership of {p} disagrees with l1, l2"));
            }
        }
    }
    for inst in 0..20u64 {
        let mut rng = trial_rng(3, 1000 + inst);
        let d = DecomposedDouble::new(
            random::dim(&mut rng, 1, 2),
            random::dim(&mut rng, 1, 2),
            random::dim(&mut rng, 1, 2),
        );
        let atlas = random_atlas(&mut rng, 3, 1, d).map_err(|e| e.to_string())?;
        let rep = check_atlas_model_hull(&atlas);
        if let Some(m) = rep.specialization_mismatches.first() {
            return Err(format!("atlas {inst}: {m}"));
        }
    }
    Ok("100 instances agree with l1, l2; 20 atlases specialize at (1,1) and (0,0)".into())
}

fn cocycle_functoriality() -> Outcome {
    for inst in 0..20u64 {
        let mut rng = trial_rng(4, inst);
        let m = random::dim(&mut rng, 1, 2);
        let d = DecomposedDouble::new(
            random::dim(&mut rng, 1, 2),
            random::dim(&mut rng, 1, 2),
            random::dim(&mut rng, 1, 2),
        );
        let atlas = random_atlas(&mut rng, 3, m, d).map_err(|e| e.to_string())?;
        if !cocycle_check(&atlas).passed() {
            return Err(format!("atlas {inst}: generated atlas fails its own cocycle"));
        }
        let rep = check_atlas_model_hull(&atlas);
        if !rep.model.passed() || !rep.hull.passed() {
            return Err(format!("atlas {inst}: an induced atlas fails the cocycle"));
        }
        if let Some(w) = rep.order_mismatches.first() {
            return Err(format!("atlas {inst}: {w}"));
        }
    }
    Ok("20 atlases, model and hull cocycles pass, V1V2 = V2V1".into())
}

fn duality() -> Outcome {
    for inst in 0..100u64 {
        let mut rng = trial_rng(5, inst);
        let a = DoubleAffine::random(&mut rng, (3, 3, 3), true);
        if let Some(w) = adjoint_duality_check(&a, &mut rng, 5).map_err(|e| e.to_string())? {
            return Err(format!("instance {inst}: {w}"));
        }
    }
    Ok("100 special instances".into())
}

fn hvh() -> Outcome {
    let mut rng = trial_rng(6, 0);
    let mut count = 0;
    for n1 in 1..=3 {
        for n2 in 1..=3 {
            for n3 in 1..=3 {
                let d = DecomposedDouble::new(n1, n2, n3);
                for _ in 0..2 {
                    let a = DoubleAffine::new(
                        d,
                        random::nonzero_vector(&mut rng, n1),
                        random::nonzero_vector(&mut rng, n2),
                        Some(random::nonzero_vector(&mut rng, n3)),
                    )
                    .unwrap();
                    let h = hvh_iso(&a).map_err(|e| format!("{d}: {e}"))?;
                    if !h.ok() {
                        return Err(format!("{d}: {}", h.iso.first_difference(&h.iso.linear_part()).unwrap_or_default()));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} instances over all dims up to (3,3,3)"))
}

fn counterexamples() -> Outcome {
    let d = DecomposedDouble::new(1, 1, 1);
    let mut hyperbola = LevelConstraint::zero(d);
    hyperbola.gyz = Matrix::from_rows(vec![vec![int(1)]], 1).unwrap();
    hyperbola.value = int(1);
    let mut plane = LevelConstraint::zero(d);
    plane.gy = Vector::from_ints(&[1]);
    plane.gz = Vector::from_ints(&[1]);
    plane.sigma = Vector::from_ints(&[1]);
    plane.value = int(1);
    let h = classify_level_set(d, &[hyperbola]).map_err(|e| e.to_string())?;
    let p = classify_level_set(d, &[plane]).map_err(|e| e.to_string())?;
    let LevelVerdict::NotSubbundle(w) = h else {
        return Err(format!("xy = 1 classified as {h:?}"));
    };
    if !p.is_subbundle() {
        return Err(format!("x + y + z = 1 classified as {p:?}"));
    }
    Ok(format!("xy = 1 is not a subbundle ({w}); x + y + z = 1 is"))
}

fn phase_tower() -> Outcome {
    let mut total = 0;
    for m in 1..=2 {
        for n in 0..=3 {
            let e = TrivialBispecial::new(m, n);
            for omega in [None, Some(Vector::basis(m, 0))] {
                let mut rng = trial_rng(8, (m * 16 + n) as u64);
                let checks = phase_tower_checks(&e, omega.as_ref(), &mut rng, 20).map_err(|err| format!("m={m} n={n}: {err}"))?;
                if let Some(c) = checks.iter().find(|c| !c.passed()) {
                    return Err(format!("m={m} n={n}: {}: {}", c.name, c.witness.clone().unwrap_or_default()));
                }
                total += checks.len();
            }
        }
    }
    Ok(format!("m <= 2, n <= 3, {total} checks"))
}

fn tau_kappa() -> Outcome {
    let mut total = 0;
    for m in 1..=2 {
        for n in 0..=3 {
            let e = TrivialBispecial::new(m, n);
            let mut rng = trial_rng(9, (m * 16 + n) as u64);
            let checks = tau_kappa_checks(&e, &mut rng, 50).map_err(|err| format!("m={m} n={n}: {err}"))?;
            if let Some(c) = checks.iter().find(|c| !c.passed()) {
                return Err(format!("m={m} n={n}: {}: {}", c.name, c.witness.clone().unwrap_or_default()));
            }
            total += checks.len();
        }
    }
    Ok(format!("50 adapted basis changes per bundle, {total} checks"))
}

fn graded(rng: &mut TrialRng, n: usize) -> NAffine {
    let space = GradedSpace::random(rng, n, 2);
    NAffine::random(rng, space, true)
}

fn naffine_duality() -> Outcome {
    let mut total = 0;
    for n in 2..=3 {
        for inst in 0..6u64 {
            let mut rng = trial_rng(10, ((n as u64) << 8) | inst);
            let a = graded(&mut rng, n);
            let bases = side_bases(&bbl_n(&a).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            if bases.len() != n + 1 {
                return Err(format!("n={n}: {} side bases", bases.len()));
            }
            let checks = side_duality_checks(&a, &mut rng, 5).map_err(|e| format!("n={n}: {e}"))?;
            if let Some(c) = checks.iter().find(|c| !c.passed()) {
                return Err(format!("n={n} {}: {}: {}", a.space(), c.name, c.witness.clone().unwrap_or_default()));
            }
            total += checks.len();
        }
    }
    Ok(format!("n = 2, 3 with dims 1..2, {total} checks"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn daff_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "daff"))
        .collect();
    v.sort();
    v
}

fn exit_code(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_daff"))
        .args(args)
        .output()
        .expect("daff runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn dsl() -> Outcome {
    let valid = daff_files(&fixtures());
    for path in &valid {
        let text = std::fs::read_to_string(path).unwrap();
        let doc = syntax::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let printed = syntax::print(&doc);
        let again = syntax::parse(&printed).map_err(|e| format!("{} reprinted: {e}", path.display()))?;
        if again != doc || syntax::print(&again) != printed {
            return Err(format!("{}: round trip differs", path.display()));
        }
    }
    let runs = [
        ("interchange", "doubles.daff"),
        ("cocycle", "atlas3.daff"),
        ("cocycle", "atlas3_perturbed.daff"),
        ("naffine", "graded.daff"),
        ("phase-tower", "phase.daff"),
    ];
    for (suite, file) in runs {
        let text = std::fs::read_to_string(fixtures().join(file)).unwrap();
        for format in [Format::Text, Format::Json] {
            let a = daff_cli::verify(file, suite, &text, DEFAULT_SEED, 20, format);
            let b = daff_cli::verify(file, suite, &text, DEFAULT_SEED, 20, format);
            if a != b {
                return Err(format!("{suite} on {file}: reports differ between runs"));
            }
        }
    }
    let dir = fixtures();
    let path = |f: &str| dir.join(f).to_string_lossy().into_owned();
    let expect = [
        (vec!["verify", "--suite", "interchange", "--trials", "10"], "doubles.daff", 0),
        (vec!["verify", "--suite", "cocycle"], "atlas3.daff", 0),
        (vec!["verify", "--suite", "cocycle"], "atlas3_perturbed.daff", 1),
        (vec!["check"], "minimal.daff", 0),
    ];
    for (args, file, code) in expect {
        let mut full = args.clone();
        let p = path(file);
        full.push(&p);
        let got = exit_code(&full);
        if got != code {
            return Err(format!("{} {file}: exit {got}, expected {code}", args.join(" ")));
        }
    }
    let errors = daff_files(&dir.join("errors"));
    for e in &errors {
        let got = exit_code(&["check", &e.to_string_lossy()]);
        if got != 2 {
            return Err(format!("{}: exit {got}, expected 2", e.display()));
        }
    }
    Ok(format!(
        "{} fixtures round-trip, reports repeat, exit codes 0/1/2 on {} runs",
        valid.len(),
        4 + errors.len()
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("interchange law", interchange_law),
        ("aff1 = aff2 on core fibers", core_fibers),
        ("hull and model membership", model_hull),
        ("cocycle functoriality", cocycle_functoriality),
        ("duality pairing", duality),
        ("HVH isomorphism", hvh),
        ("level set counterexamples", counterexamples),
        ("phase tower", phase_tower),
        ("tau and kappa under adapted bases", tau_kappa),
        ("n-affine side bases and pair duality", naffine_duality),
        ("DSL round trip, determinism, exit codes", dsl),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", k + 1),
            Err(w) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {w} ({secs:.2}s)", k + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("{} of {} criteria pass in {total:.2}s", criteria.len() - failed, criteria.len());
    if failed > 0 || total > 60.0 {
        std::process::exit(1);
    }
}
