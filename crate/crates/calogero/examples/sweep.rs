// throwaway robustness sweep over seeds for the cross-solver criterion
use calogero::dynamics::random_trajectory_state;
use calogero::liealg::{Family, RealForm};
use calogero::models::{folded_model, principal_model, FoldedSeries};
use calogero::solver::{compare_runs, integrate_rk4, solve_geodesic_group, uniform_grid};
use rand::SeedableRng;

fn main() {
    let entries = vec![
        principal_model(Family::A, 1, RealForm::Split).unwrap(),
        principal_model(Family::A, 1, RealForm::Compact).unwrap(),
        principal_model(Family::A, 2, RealForm::Split).unwrap(),
        principal_model(Family::A, 2, RealForm::Compact).unwrap(),
        folded_model(FoldedSeries::AEven, 1, RealForm::Split).unwrap(),
        folded_model(FoldedSeries::AEven, 1, RealForm::Compact).unwrap(),
    ];
    let times = uniform_grid(0.0, 1.0, 101);
    let mut worst = 0.0_f64;
    let mut truncations = 0usize;
    for seed in 1..=8u64 {
        for entry in &entries {
            let spec = &entry.spec;
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed * 7919);
            let s0 = random_trajectory_state(spec, &mut rng, 1.0);
            let geo = solve_geodesic_group(spec, &s0, &times).unwrap();
            let rk = integrate_rk4(spec, &s0, &times, 1e-3).unwrap();
            if geo.truncated.is_some() || rk.truncated.is_some() {
                truncations += 1;
                println!("seed {seed} {}: TRUNCATED", entry.name);
                continue;
            }
            let rep = compare_runs(&geo, &rk, 1e-6).unwrap();
            let m = rep
                .max_h_dev
                .max(rep.max_eig_dev)
                .max(rep.max_casimir_dev)
                .max(rep.max_trace_dev.iter().cloned().fold(0.0, f64::max));
            if !rep.pass {
                println!("seed {seed} {}: FAIL dev {m:.2e}", entry.name);
            }
            worst = worst.max(m);
        }
    }
    println!("48 runs: worst gauge-invariant deviation {worst:.3e}, truncations {truncations}");
}
