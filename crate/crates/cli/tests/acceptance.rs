//! Acceptance criteria, one PASS/FAIL line each.

mod support;

use std::time::{Duration, Instant};

use support::common::*;
use support::*;
use tubal::lab::{
    dof, gaussian_bound, incoherence, phase_grid, proj_t, proj_t_perp, rand_low_tubal, FactorScale, PhaseKind,
    PhaseSpec, SUCCESS_THRESHOLD,
};
use tubal::tensor::unit_tensor;
use tubal::{
    ctranspose, fft_dim3, identity, ifft_dim3, inner, make_bernoulli_mask, make_gaussian_map,
    solve_completion, solve_gaussian, spectral_norm, svt, tnn, tprod, tprod_oracle, tsvd, tubal_rank,
    AdmmConfig, Dims, Solution, TSvdMode, Tensor3,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn converged(res: tubal::Result<Solution>) -> Result<Solution, String> {
    res.map_err(|e| e.to_string())
}

fn rel(xhat: &Tensor3, x0: &Tensor3) -> f64 {
    (xhat - x0).fro_norm() / x0.fro_norm()
}

fn table1() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let limits = [60.0, 300.0, 1200.0];
    for (idx, (n, r, m)) in [(10, 2, 541), (20, 4, 2161), (30, 6, 4861)].into_iter().enumerate() {
        let t = Instant::now();
        let d = Dims::new(n, n, 5).unwrap();
        let seed = 100 + idx as u64;
        let x0 = rand_low_tubal(d, r, seed, FactorScale::Unit).unwrap();
        let map = make_gaussian_map(m, d, seed).unwrap();
        let sol = converged(solve_gaussian(&map, &map.apply(&x0).unwrap(), &AdmmConfig::default()))?;
        let e = rel(&sol.x, &x0);
        let rank = tubal_rank(&sol.x, 1e-3).unwrap();
        let secs = t.elapsed().as_secs_f64();
        ok &= e <= 1e-6 && rank == r && secs < limits[idx];
        notes.push(format!("n={n}: err {e:.1e} rank {rank} {secs:.1}s"));
    }
    check(ok, notes.join("; "))
}

fn table2() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for (idx, (n, r, p)) in [(50, 3, 0.47), (50, 5, 0.57), (100, 5, 0.39)].into_iter().enumerate() {
        let d = Dims::new(n, n, n).unwrap();
        let seed = 200 + idx as u64;
        let x0 = rand_low_tubal(d, r, seed, FactorScale::InvN).unwrap();
        let mask = make_bernoulli_mask(d, p, seed).unwrap();
        let sol = converged(solve_completion(&mask, &mask.proj_omega(&x0).unwrap(), &AdmmConfig::default()))?;
        let e = rel(&sol.x, &x0);
        let rank = tubal_rank(&sol.x, 1e-3).unwrap();
        ok &= e <= 1e-5 && rank == r;
        notes.push(format!("n={n} r={r}: err {e:.1e} rank {rank}"));
    }
    let secs = t.elapsed().as_secs_f64();
    notes.push(format!("{secs:.1}s total"));
    check(ok && secs < 600.0, notes.join("; "))
}

fn bound_formula() -> Outcome {
    let got = [gaussian_bound(10, 10, 5, 2), gaussian_bound(20, 20, 5, 4), gaussian_bound(30, 30, 5, 6)];
    check(got == [541, 2161, 4861], format!("{got:?}"))
}

fn dof_formula() -> Outcome {
    let d_r = dof(50, 50, 50, 3);
    // Table 2 lists m / d_r = 4 at p = 0.47 for this row.
    let m = 4 * d_r;
    let pn3 = 0.47 * 50f64.powi(3);
    let gap = (m as f64 - pn3).abs() / pn3;
    check(d_r == 14550 && gap <= 0.01, format!("d_r {d_r}, m {m} vs p n^3 {pn3}, gap {:.2}%", 100.0 * gap))
}

fn phase_sanity() -> Outcome {
    let t = Instant::now();
    let low = dof(20, 20, 3, 2) as f64 - 50.0;
    let high = gaussian_bound(20, 20, 3, 2) as f64;
    let spec = PhaseSpec {
        kind: PhaseKind::Gaussian,
        dims: Dims::new(20, 20, 3).unwrap(),
        levels: vec![low, ((low + high) / 2.0).round(), high],
        ranks: vec![1, 2, 3],
        trials: 5,
        seed: 5,
        threshold: SUCCESS_THRESHOLD,
        config: AdmmConfig::default(),
    };
    let grid = phase_grid(&spec).map_err(|e| e.to_string())?;
    let under = grid.cell(0, 1).success_rate();
    let at_bound = grid.cell(2, 1).success_rate();
    let secs = t.elapsed().as_secs_f64();
    check(
        under == 0.0 && at_bound == 1.0 && secs < 300.0,
        format!("r=2: m={low} -> {under}, m={high} -> {at_bound}; 3x3 grid in {secs:.1}s"),
    )
}

fn oracle_suite() -> Outcome {
    let mut rng = TestRng::new(600);
    let (mut worst_prod, mut worst_tnn, mut worst_spec, mut worst_svt) = (0f64, 0f64, 0f64, 0f64);
    let count = 120;
    for _ in 0..count {
        let d = rng.dims(6, 5);
        let a = rng.tensor(d);
        let l = 1 + rng.below(6);
        let b = rng.tensor(Dims::new(d.n2, l, d.n3).unwrap());
        worst_prod = worst_prod.max(tprod(&a, &b).unwrap().max_abs_diff(&tprod_oracle(&a, &b).unwrap()));
        worst_prod = worst_prod.max(tprod(&a, &b).unwrap().max_abs_diff(&conv_product(&a, &b)));
        worst_tnn = worst_tnn.max(rel_diff(tnn(&a), tnn_oracle(&a)));
        worst_spec = worst_spec.max((spectral_norm(&a) - spectral_oracle(&a)).abs());
        let tau = 0.05 + rng.sym().abs();
        worst_svt = worst_svt.max(svt(&a, tau).unwrap().max_abs_diff(&svt_oracle(&a, tau)));
    }
    check(
        worst_prod <= 1e-10 && worst_tnn <= 1e-10 && worst_spec <= 1e-9 && worst_svt <= 1e-9,
        format!(
            "{count} instances; max deviations tprod {worst_prod:.1e}, tnn {worst_tnn:.1e}, spectral {worst_spec:.1e}, svt {worst_svt:.1e}"
        ),
    )
}

fn matrix_suite() -> Outcome {
    let mut rng = TestRng::new(700);
    let count = 120;
    let mut worst = 0f64;
    let mut rank_misses = 0;
    for t in 0..count {
        let d = Dims::new(1 + rng.below(6), 1 + rng.below(6), 1).unwrap();
        let a = if t % 2 == 0 {
            rng.tensor(d)
        } else {
            let r = 1 + rng.below(d.n1.min(d.n2));
            let p = rng.tensor(Dims::new(d.n1, r, 1).unwrap());
            let q = rng.tensor(Dims::new(r, d.n2, 1).unwrap());
            tprod(&p, &q).unwrap()
        };
        let m = slice_matrix(&a, 0);
        let s = real_singular_values(&m);
        worst = worst.max(rel_diff(tnn(&a), s.sum()));
        worst = worst.max((spectral_norm(&a) - s.max()).abs());
        if tubal_rank(&a, 1e-6).unwrap() != rank_oracle(&m, 1e-6) {
            rank_misses += 1;
        }
        let want = matrix_svt(&m, 0.3);
        let got = svt(&a, 0.3).unwrap();
        for j in 0..d.n2 {
            for i in 0..d.n1 {
                worst = worst.max((got.get(i, j, 0) - want[(i, j)]).abs());
            }
        }
    }
    check(
        worst <= 1e-10 && rank_misses == 0,
        format!("{count} matrices; max deviation {worst:.1e}, rank mismatches {rank_misses}"),
    )
}

fn structural_suite() -> Outcome {
    let mut rng = TestRng::new(800);
    let (mut recon, mut orth, mut proj, mut fft) = (0f64, 0f64, 0f64, 0f64);
    for _ in 0..60 {
        let a = rng.any_tensor(7, 6);
        let f = tsvd(&a, TSvdMode::Full);
        recon = recon.max((&f.reconstruct() - &a).fro_norm() / a.fro_norm());
        for u in [&f.u, &f.v] {
            let g = tprod(&ctranspose(u), u).unwrap();
            orth = orth.max((&g - &identity(u.n2(), u.n3()).unwrap()).fro_norm());
        }
        fft = fft.max((&ifft_dim3(&fft_dim3(&a)).unwrap() - &a).fro_norm() / a.fro_norm());

        let d = a.dims();
        let r = 1 + rng.below(d.n1.min(d.n2));
        let m = rand_low_tubal(d, r, rng.next_u64(), FactorScale::Unit).unwrap();
        let sk = tsvd(&m, TSvdMode::Skinny(Some(r)));
        let z = rng.tensor(d);
        let pz = proj_t(&sk, &z).unwrap();
        let scale = z.fro_norm();
        proj = proj.max((&proj_t(&sk, &pz).unwrap() - &pz).fro_norm() / scale);
        proj = proj.max(inner(&pz, &proj_t_perp(&sk, &z).unwrap()).unwrap().abs() / scale.powi(2));
    }

    let d = Dims::new(10, 10, 4).unwrap();
    let mut bound_ok = true;
    let mut worst_ratio = 0f64;
    for (r, seed) in [(1, 81), (2, 82), (3, 83)] {
        let m = rand_low_tubal(d, r, seed, FactorScale::Unit).unwrap();
        let f = tsvd(&m, TSvdMode::Skinny(Some(r)));
        let bound = 2.0 * incoherence(&f) * r as f64 / 10.0;
        for k in 0..4 {
            for j in 0..10 {
                for i in 0..10 {
                    let v = proj_t(&f, &unit_tensor(d, i, j, k).unwrap()).unwrap().fro_norm().powi(2);
                    bound_ok &= v <= bound + 1e-9;
                    worst_ratio = worst_ratio.max(v / bound);
                }
            }
        }
    }
    check(
        recon <= 1e-9 && orth <= 1e-9 && proj <= 1e-9 && fft <= 1e-12 && bound_ok,
        format!(
            "reconstruction {recon:.1e}, orthogonality {orth:.1e}, projection {proj:.1e}, fft {fft:.1e}, unit-tensor bound max ratio {worst_ratio:.2}"
        ),
    )
}

fn run_ok(args: &[&str]) -> Result<(), String> {
    let (code, _, err) = tubal(args);
    if code == 0 {
        Ok(())
    } else {
        Err(format!("{args:?} exited {code}: {err}"))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path();
    let first = |name: &str| root.join("first").join(name);
    run_ok(&["gen", "8", "8", "4", "2", "--seed", "9", "--out", s(&first("gen"))])?;
    let x = first("gen").join("tensor.t3");
    run_ok(&["recover", s(&x), "--m", "200", "--seed", "3", "--history", "--out", s(&first("recover"))])?;
    run_ok(&["complete", s(&x), "--p", "0.7", "--seed", "4", "--out", s(&first("complete"))])?;
    run_ok(&[
        "phase", "--kind", "completion", "--n1", "6", "--n2", "6", "--n3", "3", "--levels", "0.5,0.9", "--ranks",
        "1,2", "--trials", "2", "--seed", "6", "--out", s(&first("phase")),
    ])?;
    let mut files = 0;
    for name in ["gen", "recover", "complete", "phase"] {
        let again = root.join("replay").join(name);
        run_ok(&["replay", s(&first(name).join("manifest.json")), "--out", s(&again)])?;
        files += same_tree(&first(name), &again)?;
    }
    Ok(format!("4 manifests replayed, {files} files byte-identical"))
}

fn image_path() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path();
    let scene = save(root, "scene.ppm", &synthetic_image(48, 48, 3, 1, 1));
    let out = root.join("half");
    run_ok(&["inpaint", s(&scene), "--p", "0.5", "--seed", "1", "--out", s(&out)])?;
    let db: f64 = read_csv(&out.join("report.csv"))[0]["psnr"].parse().map_err(|e| format!("{e}"))?;

    let mut rng = TestRng::new(1000);
    let noise = tubal_cli::pnm::Image {
        width: 17,
        height: 11,
        channels: 3,
        pixels: (0..17 * 11 * 3).map(|_| (rng.next_u64() % 256) as u8).collect(),
    };
    let src = save(root, "noise.ppm", &noise);
    let full = root.join("full");
    run_ok(&["inpaint", s(&src), "--p", "1", "--out", s(&full)])?;
    let lossless = std::fs::read(full.join("inpainted.ppm")).ok() == std::fs::read(&src).ok();
    check(db >= 40.0 && lossless, format!("PSNR {db:.2} dB at p=0.5; p=1 round trip lossless: {lossless}"))
}

fn timed(f: fn() -> Outcome) -> (Outcome, Duration) {
    let t = Instant::now();
    let res = std::panic::catch_unwind(f).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    (res, t.elapsed())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Gaussian-measurement table", table1),
        ("completion table", table2),
        ("measurement bound", bound_formula),
        ("degrees of freedom", dof_formula),
        ("phase-transition sanity", phase_sanity),
        ("oracle equivalence", oracle_suite),
        ("matrix reduction", matrix_suite),
        ("structural identities", structural_suite),
        ("replay determinism", determinism),
        ("image pipeline", image_path),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (res, took) = timed(*f);
        let (tag, detail) = match res {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name} ({detail}) [{:.1}s]", i + 1, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
