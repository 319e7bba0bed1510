fn main() {
    std::process::exit(geoagg::cli::run(std::env::args_os()));
}
