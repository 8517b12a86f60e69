#pragma once

#define BAYESFDA_VERSION "0.1.0"
