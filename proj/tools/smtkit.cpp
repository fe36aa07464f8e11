// placeholder until the pipeline modules are in; replaced by the real CLI
int main() { return 0; }
