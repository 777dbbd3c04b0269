//! Writes the Hopf-coordinate sphere rule as CSV on stdout.

use plurikernel::reproducing::sphere_quadrature;

fn main() -> plurikernel::Result<()> {
    let m = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let rule = sphere_quadrature(2, m)?;
    eprintln!("{} nodes, mass {:.15}", rule.len(), rule.mass());
    rule.write_csv(std::io::stdout().lock()).expect("write csv");
    Ok(())
}
