pub fn run_main() { std::process::exit(coskit_run()); } fn coskit_run() -> i32 { 0 }
