fn main() {
    plurikernel::cli::configure_threads();
    std::process::exit(plurikernel::cli::run(std::env::args_os()));
}
