//! How many instances does it take to tell two features apart?
//!
//! Run with `cargo run --example sample_sizes`.

use fsaudit::samplesize::{
    linspace_step, mcnemar_sample_size, sample_size_curve, smoothed_sample_size, Agreement, McNemarPlan, SmoothedPlan,
};

fn main() -> fsaudit::Result<()> {
    // Two single-feature classifiers, 85% and 80% accurate.
    for d in [0.68, 0.75, 0.80] {
        let n = mcnemar_sample_size(&McNemarPlan::new(0.85, 0.80, d, 0.05)?)?;
        println!("counting, d_agree = {d:.2}: N = {n:.1}");
    }

    // Continuous correctness scores (posterior of the true class).
    let one = smoothed_sample_size(&SmoothedPlan::new(0.85, 0.80, 0.04, 0.04, 0.0, 0.05, false)?)?;
    let two = smoothed_sample_size(&SmoothedPlan::new(0.85, 0.80, 0.04, 0.04, 0.0, 0.05, true)?)?;
    println!("smoothed: N_c = {:.1} one-tailed, {:.1} two-tailed", one.n, two.n);

    println!("\np1,alpha,N");
    let grid = linspace_step(0.55, 0.95, 0.05);
    for p in sample_size_curve(&grid, 0.05, &[0.05, 0.01], Agreement::Independent)? {
        println!("{:.2},{},{:.1}", p.p1, p.alpha, p.n);
    }
    Ok(())
}
