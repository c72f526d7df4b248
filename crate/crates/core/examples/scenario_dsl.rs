//! Parsing a scenario, running it and rendering both report formats.

use equivar::cli::{parse_scenario, run, serialize, Format};

const SCENARIO: &str = "\
# Dold-type action on CP^2 x S^3
field = C
n = 2
m = 3
action identity
d[4](b) = t^4
free = true
command = orbit
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = parse_scenario(SCENARIO)?;
    println!("canonical form:\n{}", serialize(&scenario));
    let report = run(&scenario)?;
    print!("{}", report.render(Format::Tsv));
    for v in &report.verdicts {
        println!("verdict {}: {} ({})", v.name, v.ok, v.detail);
    }

    let broken = "field = R\nn = 3\nm = 2\naction identity\nd[2](a) = t^2\nd[2](b) = t^2*a\ncommand = ss\n";
    match parse_scenario(broken).map_err(equivar::Error::from).and_then(|s| run(&s)) {
        Ok(_) => println!("unexpectedly consistent"),
        Err(e) => println!("error[{}] (exit {}): {e}", e.code(), e.exit_code()),
    }
    Ok(())
}
