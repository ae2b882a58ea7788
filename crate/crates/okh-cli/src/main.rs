//! `okh`: link homology over Z[pi]/(pi^2 - 1) from the command line.

fn main() {
    // Subcommands land here once the core engine is wired up.
    eprintln!("okh: not yet wired");
    std::process::exit(2);
}
