#!/usr/bin/env node
import { runPlotgen } from './index.js';

function main(argv: string[]): number {
  const args = argv.slice(2);
  let specPath: string | undefined;
  for (let i = 0; i < args.length; i++) {
    if (args[i] === '--spec') {
      specPath = args[++i];
    } else if (args[i] === '--help' || args[i] === '-h') {
      console.log('usage: plotgen --spec <plotspec.json>');
      return 0;
    } else if (!specPath && !args[i].startsWith('-')) {
      specPath = args[i];
    }
  }
  if (!specPath) {
    console.error('usage: plotgen --spec <plotspec.json>');
    return 1;
  }
  return runPlotgen(specPath);
}

process.exit(main(process.argv));
