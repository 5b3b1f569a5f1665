//! Driving the command-line layer from code: a config is layered from a TOML
//! string and rendered exactly as `chiral-scatter sweep` would print it.

use chiral_scatter::cli::{render, Command, RunConfig};

fn main() {
    let mut cfg: RunConfig = toml::from_str(
        r#"
        m = 6
        sigma = 1.5
        delta = 0.2
        "#,
    )
    .expect("valid config");
    cfg.command = Command::Sweep;
    let out = render(&cfg).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        std::process::exit(2)
    });
    print!("{}", String::from_utf8_lossy(&out.bytes));
}
