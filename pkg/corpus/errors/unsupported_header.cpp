// VERDICT: ERROR
#include <iostream>
int main() { return 0; }
