fn main() {
    std::process::exit(tracelink::cli::run(std::env::args_os()));
}
