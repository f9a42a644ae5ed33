fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    std::process::exit(bearing_sim::cli::cli_main(&args));
}
