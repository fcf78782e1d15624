fn main() {
    std::process::exit(ma_array_opt::harness::cli_main(std::env::args_os()));
}
