unsigned char model_data[] = {
  0x4d, 0x4c, 0x51, 0x31, 0x01, 0x01, 0x02, 0x00, 0x06, 0x00, 0x00, 0x00,
  0x08, 0x00, 0x00, 0x00, 0x01, 0xb9, 0x6e, 0xa6, 0x3b, 0x01, 0x00, 0x00,
  0x00, 0xd3, 0xdc, 0x75, 0x97, 0x08, 0xe6, 0x66, 0x0f, 0x04, 0xb6, 0x7c,
  0x60, 0x4a, 0xb8, 0x7f, 0xde, 0x09, 0x7d, 0x23, 0xa0, 0x5c, 0xd6, 0xea,
  0x7f, 0xd1, 0xe6, 0x41, 0x91, 0x3b, 0x62, 0xab, 0x9e, 0xda, 0xab, 0x88,
  0x80, 0x36, 0xde, 0x8c, 0x1c, 0x12, 0xd7, 0x74, 0xe5, 0x30, 0x78, 0x24,
  0xbe, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
  0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
  0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x08, 0x00, 0x00,
  0x00, 0x02, 0x00, 0x00, 0x00, 0x02, 0xa9, 0x27, 0x8e, 0x3b, 0x10, 0x00,
  0x00, 0x00, 0x21, 0xa2, 0xe9, 0xf6, 0x7f, 0x8e, 0xab, 0x0d, 0x68, 0x42,
  0x57, 0xb9, 0x80, 0x8e, 0x7b, 0x64, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
  0x00, 0x00
};
unsigned int model_data_len = 146;
