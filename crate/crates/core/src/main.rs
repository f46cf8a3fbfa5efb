fn main() {
    let code = cle_radii::cli::main_with_args(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr());
    std::process::exit(code);
}
