fn main() {
    std::process::exit(chiral_scatter::cli::main_with(std::env::args_os(), std::env::vars()));
}
