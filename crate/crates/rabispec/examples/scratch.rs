use rabispec::ed::{build_hamiltonian, eigenvalues};
use rabispec::params::ModelParams;
use rabispec::vanvleck::{static_splitting, CorrectionPolicy};

fn main() {
    let policy = CorrectionPolicy { include_second_order: true, ..Default::default() };
    for g in [0.2, 0.5] {
        println!("g = {g}: eps0 | ed10 ed21 | vv l=0 | vv l=1 | rel(l0 vs 10) rel(l1 vs 21)");
        for i in 0..=30 {
            let eps0 = 1.5 * i as f64 / 30.0;
            let p = ModelParams { g, eps0, ..Default::default() };
            let ev = eigenvalues(&build_hamiltonian(&p, 40).unwrap());
            let (e10, e21) = (ev[1] - ev[0], ev[2] - ev[1]);
            let v0 = static_splitting(0, 0, eps0, &p, &policy)
                .map(|v| format!("{v:.5}"))
                .unwrap_or_else(|_| "ERR".into());
            let v1 = static_splitting(0, 1, eps0, &p, &policy)
                .map(|v| format!("{v:.5}"))
                .unwrap_or_else(|_| "ERR".into());
            let r0 = v0
                .parse::<f64>()
                .map(|v| format!("{:.4}", (v - e10).abs() / e10))
                .unwrap_or_default();
            let r1 = v1
                .parse::<f64>()
                .map(|v| format!("{:.4}", (v - e21).abs() / e21))
                .unwrap_or_default();
            println!("  {eps0:+.3}: {e10:.5} {e21:.5} | {v0} | {v1} | {r0} {r1}");
        }
    }

    // minimum avoided-crossing gap vs the dressed element
    for g in [0.2f64, 0.5] {
        let alpha = (2.0 * g / 1.5f64).powi(2);
        let expect = alpha.sqrt() * (-alpha / 2.0f64).exp();
        let mut min_gap = f64::INFINITY;
        let mut at = 0.0;
        for i in 0..=100 {
            let eps0 = 0.8 + 0.9 * i as f64 / 100.0;
            let p = ModelParams { g, eps0, ..Default::default() };
            let ev = eigenvalues(&build_hamiltonian(&p, 40).unwrap());
            if ev[2] - ev[1] < min_gap {
                min_gap = ev[2] - ev[1];
                at = eps0;
            }
        }
        println!(
            "g = {g}: min crossing gap {min_gap:.5} at eps0 = {at:.3}, dressed element {expect:.5}, rel {:.3}",
            (min_gap - expect).abs() / expect
        );
    }
}
