fn main() {
    std::process::exit(holo_lwe_lab::main_with_args(std::env::args_os()));
}
