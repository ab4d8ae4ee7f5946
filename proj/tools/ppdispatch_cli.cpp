// Placeholder main; the full CLI lands with the experiments layer.
int main() { return 0; }
