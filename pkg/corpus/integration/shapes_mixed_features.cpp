// VERDICT: SUCCESSFUL
// FLAGS: --unwind 5
template <int Cap> struct RingLimit {
  int cap() { return Cap; }
};

class Shape {
  public:
  virtual int area() { return 0; }
};

class Square : public Shape {
  public:
  Square(int side) { edge = side; }
  int area() override { return edge * edge; }
  private:
  int edge;
};

class Rect : public Shape {
  public:
  Rect(int w, int h) { width = w; height = h; }
  int area() override { return width * height; }
  private:
  int width;
  int height;
};

int checked_area(Shape *s) throw(int) {
  int a = s->area();
  if (a <= 0) { throw a; }
  return a;
}

int main() {
  RingLimit<3> limit;
  int total = 0;
  for (int i = 1; i <= limit.cap(); i++) {
    Shape *s;
    if (i == 2) { s = new Rect(i, i + 1); } else { s = new Square(i); }
    try {
      total = total + checked_area(s);
    } catch (int bad) {
      total = 0 - 1;
    }
    delete s;
  }
  assert(total == 1 + 6 + 9);
  return 0;
}
