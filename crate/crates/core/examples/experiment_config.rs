//! Driving the command-line runner from code, the same way `grainy --config` does.

use grainy::cli::{run, Command, ExperimentConfig, Grid};

fn main() -> grainy::Result<()> {
    let dir = std::env::temp_dir().join("grainy-example");
    let cfg = ExperimentConfig {
        command: Command::Bound,
        map: "baker".into(),
        grid: Grid { cells_q: 32, cells_p: 32 },
        depth: 8,
        samples: 500_000,
        seed: 7,
        output_dir: dir.clone(),
        label: Some("baker-bound".into()),
        ..Default::default()
    };
    println!("{}", serde_json::to_string_pretty(&cfg)?);
    let outcome = run(&cfg)?;
    println!("{}", outcome.summary);
    for f in outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
