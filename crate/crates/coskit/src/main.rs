fn main() { coskit::cli::run_main(); }
