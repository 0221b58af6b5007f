//! Rank the selection schemes within each (dataset, run) block, test for
//! differences and find the group indistinguishable from the best.

use fsaudit::classifiers::ClassifierKind;
use fsaudit::dataset::synth::GaussianProblem;
use fsaudit::harness::{run_grid, GridConfig};
use fsaudit::rankers::RankerKind;
use fsaudit::stats::{combination_ranking, selector_rank_table, Metric};

fn main() -> fsaudit::Result<()> {
    let datasets: Vec<_> = (0..3)
        .map(|i| GaussianProblem::new(20, 30, 3, 1.0).generate(&format!("g{i}"), 10 + i))
        .collect();
    let config = GridConfig {
        runs: 3,
        classifiers: vec![ClassifierKind::Ldc, ClassifierKind::Nb],
        rankers: vec![RankerKind::Su, RankerKind::SvmW],
        ..GridConfig::default()
    };
    let records = run_grid(&config, &datasets)?;

    let table = selector_rank_table(&records, Metric::TrueError, 0.05);
    let header: Vec<&str> = table.columns.iter().map(|c| c.tag()).collect();
    println!("{:<12} {}", "", header.iter().map(|h| format!("{h:>6}")).collect::<String>());
    for row in &table.rows {
        let cells: String = row
            .avg_ranks
            .iter()
            .enumerate()
            .map(|(j, r)| format!("{:>6}", format!("{r:.2}{}", if row.best_group.contains(&j) { "*" } else { "" })))
            .collect();
        let p = row.friedman.map_or(f64::NAN, |f| f.p_value);
        println!("{:<12} {cells}   p = {p:.3}", format!("{}/{}", row.classifier.tag(), row.ranker.tag()));
    }
    println!("(* = not distinguishable from the best at alpha 0.05)\n");

    let combos = combination_ranking(&records, Metric::TrueError)?;
    println!("{} combinations over {} blocks; best five:", combos.rows.len(), combos.n_blocks);
    for r in combos.rows.iter().take(5) {
        println!("  {:<20} {:.2}", r.label(), r.avg_rank);
    }
    Ok(())
}
